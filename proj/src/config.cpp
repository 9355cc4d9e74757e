#include "sftdim/config.hpp"

#include <cmath>
#include <fstream>

#include "sftdim/sha256.hpp"

namespace sftdim {

using nlohmann::json;

namespace {

std::string join_names(const Sft& sft, const std::vector<int>& word) {
  std::string key;
  for (size_t i = 0; i < word.size(); ++i) {
    if (i) key += ',';
    key += sft.name(word[i]);
  }
  return key;
}

std::vector<std::vector<int>> parse_adjacency(const json& doc) {
  if (!doc.contains("adjacency") || !doc["adjacency"].is_array())
    throw Error(ErrorCode::Schema, "missing adjacency matrix");
  std::vector<std::vector<int>> adj;
  for (const auto& row : doc["adjacency"]) {
    if (!row.is_array()) throw Error(ErrorCode::Schema, "adjacency rows must be arrays");
    std::vector<int> r;
    for (const auto& x : row) {
      if (!x.is_number_integer()) throw Error(ErrorCode::Schema, "adjacency entries must be integers");
      r.push_back(x.get<int>());
    }
    adj.push_back(std::move(r));
  }
  return adj;
}

std::vector<std::string> parse_alphabet(const json& doc) {
  if (!doc.contains("alphabet") || !doc["alphabet"].is_array())
    throw Error(ErrorCode::Schema, "missing alphabet");
  std::vector<std::string> names;
  for (const auto& x : doc["alphabet"]) {
    if (!x.is_string()) throw Error(ErrorCode::Schema, "alphabet entries must be strings");
    std::string s = x.get<std::string>();
    if (s.empty() || s.find(',') != std::string::npos)
      throw Error(ErrorCode::Schema, "symbol names must be nonempty and comma-free");
    names.push_back(std::move(s));
  }
  for (size_t i = 0; i < names.size(); ++i)
    for (size_t j = i + 1; j < names.size(); ++j)
      if (names[i] == names[j]) throw Error(ErrorCode::Schema, "duplicate symbol name " + names[i]);
  return names;
}

LocallyConstantFn parse_fn(const Sft& sft, const json& block, const std::string& which,
                           bool require_positive) {
  if (!block.is_object() || !block.contains("depth") || !block.contains("table"))
    throw Error(ErrorCode::Schema, which + " must be {depth, table}");
  if (!block["depth"].is_number_integer())
    throw Error(ErrorCode::Schema, which + ".depth must be an integer");
  int depth = block["depth"].get<int>();
  if (depth < 1) throw Error(ErrorCode::Schema, which + ".depth must be >= 1");
  const json& table = block["table"];
  if (!table.is_object()) throw Error(ErrorCode::Schema, which + ".table must be an object");

  auto words = enumerate_words(sft, depth);
  std::vector<double> values;
  values.reserve(words.size());
  size_t used = 0;
  for (const auto& w : words) {
    std::string key = join_names(sft, w);
    auto it = table.find(key);
    if (it == table.end())
      throw Error(ErrorCode::Schema, which + ".table is missing admissible word \"" + key + "\"");
    if (!it->is_number())
      throw Error(ErrorCode::Schema, which + ".table[\"" + key + "\"] must be a number");
    double v = it->get<double>();
    if (!std::isfinite(v))
      throw Error(ErrorCode::Schema, which + ".table[\"" + key + "\"] must be finite");
    values.push_back(v);
    ++used;
  }
  if (table.size() != used) {
    for (auto it = table.begin(); it != table.end(); ++it) {
      bool known = false;
      for (const auto& w : words)
        if (join_names(sft, w) == it.key()) {
          known = true;
          break;
        }
      if (!known)
        throw Error(ErrorCode::Schema,
                    which + ".table has entry \"" + it.key() + "\" for a non-admissible word");
    }
  }
  auto fn = LocallyConstantFn::from_lex_values(sft, depth, std::move(values));
  if (require_positive && !fn.strictly_positive())
    throw Error(ErrorCode::NonPositiveFunction, which + " must be strictly positive");
  return fn;
}

std::vector<std::vector<double>> parse_markov(const json& doc) {
  std::vector<std::vector<double>> P;
  for (const auto& row : doc["markov"]) {
    if (!row.is_array()) throw Error(ErrorCode::Schema, "markov rows must be arrays");
    std::vector<double> r;
    for (const auto& x : row) {
      if (!x.is_number()) throw Error(ErrorCode::Schema, "markov entries must be numbers");
      r.push_back(x.get<double>());
    }
    P.push_back(std::move(r));
  }
  return P;
}

json fn_to_json(const Sft& sft, const LocallyConstantFn& fn) {
  json table = json::object();
  auto words = enumerate_words(sft, fn.depth());
  for (size_t i = 0; i < words.size(); ++i)
    table[join_names(sft, words[i])] = fn.lex_values()[i];
  return json{{"depth", fn.depth()}, {"table", std::move(table)}};
}

}  // namespace

std::string canonical_dump(const json& doc) { return doc.dump(); }

std::string config_digest(const json& doc) { return sha256_hex(canonical_dump(doc)); }

Model load_model(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::Schema, "config must be a JSON object");
  Model model;
  auto names = parse_alphabet(doc);
  auto adj = parse_adjacency(doc);
  if (!doc.contains("theta") || !doc["theta"].is_number())
    throw Error(ErrorCode::Schema, "missing theta");
  model.sft = validate_sft(adj, doc["theta"].get<double>(), names);

  if (!doc.contains("roof")) throw Error(ErrorCode::Schema, "missing roof block");
  if (!doc.contains("fu")) throw Error(ErrorCode::Schema, "missing fu block");
  model.roof = parse_fn(model.sft, doc["roof"], "roof", true);
  model.fu = parse_fn(model.sft, doc["fu"], "fu", true);
  if (doc.contains("fs") && !doc["fs"].is_null()) {
    model.fs = parse_fn(model.sft, doc["fs"], "fs", true);
    model.fs_defaulted = false;
  } else {
    model.fs = model.fu;
    model.fs_defaulted = true;
  }
  if (doc.contains("markov") && !doc["markov"].is_null()) {
    if (!doc["markov"].is_array()) throw Error(ErrorCode::Schema, "markov must be a matrix");
    model.markov = validate_markov(model.sft, parse_markov(doc));
  }
  model.digest = config_digest(doc);
  return model;
}

Model load_model_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::Io, "cannot open config " + path);
  json doc;
  try {
    f >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("config is not valid JSON: ") + e.what());
  }
  return load_model(doc);
}

std::vector<ConfigIssue> collect_config_issues(const json& doc) {
  std::vector<ConfigIssue> issues;
  auto attempt = [&issues](auto&& step) {
    try {
      step();
      return true;
    } catch (const Error& e) {
      issues.push_back({error_code_name(e.code()), e.what()});
    } catch (const std::exception& e) {
      issues.push_back({"Schema", e.what()});
    }
    return false;
  };

  Sft sft;
  bool have_sft = attempt([&] {
    auto names = parse_alphabet(doc);
    auto adj = parse_adjacency(doc);
    if (!doc.contains("theta") || !doc["theta"].is_number())
      throw Error(ErrorCode::Schema, "missing theta");
    sft = validate_sft(adj, doc["theta"].get<double>(), names);
  });
  if (!have_sft) return issues;

  LocallyConstantFn fu;
  attempt([&] {
    if (!doc.contains("roof")) throw Error(ErrorCode::Schema, "missing roof block");
    parse_fn(sft, doc["roof"], "roof", true);
  });
  attempt([&] {
    if (!doc.contains("fu")) throw Error(ErrorCode::Schema, "missing fu block");
    fu = parse_fn(sft, doc["fu"], "fu", true);
  });
  attempt([&] {
    if (doc.contains("fs") && !doc["fs"].is_null()) parse_fn(sft, doc["fs"], "fs", true);
  });
  attempt([&] {
    if (doc.contains("markov") && !doc["markov"].is_null())
      validate_markov(sft, parse_markov(doc));
  });
  return issues;
}

json model_to_json(const Model& model) {
  json doc;
  doc["alphabet"] = model.sft.names;
  json adj = json::array();
  for (int i = 0; i < model.sft.n; ++i) {
    json row = json::array();
    for (int j = 0; j < model.sft.n; ++j) row.push_back(model.sft.edge(i, j) ? 1 : 0);
    adj.push_back(std::move(row));
  }
  doc["adjacency"] = std::move(adj);
  doc["theta"] = model.sft.theta;
  doc["roof"] = fn_to_json(model.sft, model.roof);
  doc["fu"] = fn_to_json(model.sft, model.fu);
  if (!model.fs_defaulted) doc["fs"] = fn_to_json(model.sft, model.fs);
  if (model.markov) {
    json P = json::array();
    for (int i = 0; i < model.sft.n; ++i) {
      json row = json::array();
      for (int j = 0; j < model.sft.n; ++j) row.push_back(model.markov->p(i, j));
      P.push_back(std::move(row));
    }
    doc["markov"] = std::move(P);
  }
  return doc;
}

json model_to_json(const Model& model, const MarkovMeasure& markov) {
  Model with = model;
  with.markov = markov;
  return model_to_json(with);
}

json recode_config(const Model& model, int ell) {
  LocallyConstantFn fns_in[3] = {model.roof, model.fu, model.fs};
  Recoded rec = block_recode(model.sft, std::span<const LocallyConstantFn>(fns_in, 3), ell);
  Model out;
  out.sft = rec.sft;
  out.roof = rec.fns[0];
  out.fu = rec.fns[1];
  out.fs = rec.fns[2];
  out.fs_defaulted = model.fs_defaulted;
  if (model.markov) out.markov = induced_block_measure(*model.markov, rec);
  return model_to_json(out);
}

}  // namespace sftdim

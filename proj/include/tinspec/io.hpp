#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tinspec/ar_model.hpp"
#include "tinspec/completion.hpp"
#include "tinspec/covariance.hpp"
#include "tinspec/errors.hpp"
#include "tinspec/rar_spectrum.hpp"
#include "tinspec/spectrum.hpp"

namespace tinspec::io {

using json = nlohmann::json;

/// 12 significant digits; infinities as `inf` / `-inf`.
inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_tin(const TinValue& t) { return format_number(t.to_double()); }

/// JSON has no infinity; non-finite values are written as strings.
inline json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

inline double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
  }
  throw InvalidInput("expected a number in JSON input");
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline double parse_double(const std::string& token) {
  const std::string t = trim(token);
  if (t.empty()) throw InvalidInput("empty number");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw InvalidInput("not a number: '" + t + "'");
  }
  if (used != t.size()) throw InvalidInput("not a number: '" + t + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace detail

/// "1,0.6054,0.1324" -> lags c_0, c_1, c_2.
inline CovarianceSequence parse_covariance_list(const std::string& text) {
  std::vector<double> c;
  for (const auto& tok : detail::split(text, ',')) c.push_back(detail::parse_double(tok));
  return CovarianceSequence(std::move(c));
}

/// CSV with rows `lag,value` (an optional header and '#' comments are
/// skipped) or a single column of values in lag order.
inline CovarianceSequence read_covariance_csv(std::istream& in) {
  std::vector<double> c;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = detail::split(line, ',');
    if (first) {
      first = false;
      const std::string head = detail::trim(cols.front());
      if (!head.empty() && (std::isalpha(static_cast<unsigned char>(head.front())) || head.front() == '_') &&
          head != "inf" && head != "nan") {
        continue;
      }
    }
    if (cols.size() == 1) {
      c.push_back(detail::parse_double(cols[0]));
    } else if (cols.size() == 2) {
      const double lag = detail::parse_double(cols[0]);
      if (lag != static_cast<double>(c.size())) throw InvalidInput("CSV lags must be 0, 1, 2, ... in order");
      c.push_back(detail::parse_double(cols[1]));
    } else {
      throw InvalidInput("CSV rows must be 'lag,value' or 'value'");
    }
  }
  return CovarianceSequence(std::move(c));
}

/// {"c": [...]} (also accepted: a bare array).
inline CovarianceSequence covariance_from_json(const json& j) {
  const json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("c")) throw InvalidInput("JSON covariance needs a \"c\" array");
    arr = &j.at("c");
  }
  if (!arr->is_array()) throw InvalidInput("JSON covariance must be an array");
  std::vector<double> c;
  for (const auto& v : *arr) c.push_back(number_from_json(v));
  return CovarianceSequence(std::move(c));
}

inline CovarianceSequence read_covariance_json(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
  return covariance_from_json(j);
}

/// Dispatches on the extension (.json / .csv); otherwise sniffs the
/// first non-blank character.
inline CovarianceSequence load_covariance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  const auto ext = path.extension().string();
  if (ext == ".json") return read_covariance_json(in);
  if (ext == ".csv") return read_covariance_csv(in);
  char ch = 0;
  while (in.get(ch) && std::isspace(static_cast<unsigned char>(ch))) {
  }
  in.clear();
  in.seekg(0);
  return (ch == '{' || ch == '[') ? read_covariance_json(in) : read_covariance_csv(in);
}

inline void write_covariance_csv(std::ostream& out, const CovarianceSequence& seq) {
  out << "lag,value\n";
  for (std::size_t l = 0; l < seq.size(); ++l) out << l << ',' << format_number(seq[l]) << '\n';
}

inline json to_json(const CovarianceSequence& seq) {
  json arr = json::array();
  for (double v : seq.values()) arr.push_back(json_number(v));
  return arr;
}

inline json to_json(const ArModel& m) {
  json a = json::array();
  for (double v : m.coeffs()) a.push_back(v);
  return {{"type", "ar"}, {"a", a}, {"sigma_w2", m.sigma_w2()}};
}

inline ArModel ar_model_from_json(const json& j) {
  if (!j.contains("a") || !j.contains("sigma_w2")) throw InvalidInput("AR JSON needs \"a\" and \"sigma_w2\"");
  std::vector<double> a;
  for (const auto& v : j.at("a")) a.push_back(number_from_json(v));
  return ArModel(std::move(a), number_from_json(j.at("sigma_w2")));
}

inline json to_json(const RarSpectrum& s) {
  json out{{"type", "rar"}};
  const auto poles = s.poles();
  json p = json::array();
  for (const auto& z : poles.poles) p.push_back({z.real(), z.imag()});
  out["gamma"] = poles.gamma;
  out["poles"] = p;
  json lambda = json::array();
  for (double v : s.coefficients().lambda) lambda.push_back(v);
  out["lambda"] = lambda;
  return out;
}

inline json to_json(const CompletionResult& r) {
  json out;
  out["method"] = std::string(to_string(r.method));
  out["c"] = to_json(r.covariances);
  out["model"] = std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else {
          return to_json(m);
        }
      },
      r.model);
  json diag = json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = json_number(v);
  for (const auto& [k, vs] : r.series) {
    json arr = json::array();
    for (double v : vs) arr.push_back(json_number(v));
    diag[k] = arr;
  }
  out["diagnostics"] = diag;
  return out;
}

struct SpectrumColumns {
  bool log_s = false;
  bool inv_s = false;
};

/// `f,S[,log_S][,inv_S]` rows; zeros give log_S = -inf and inv_S = inf.
inline void write_spectrum_csv(std::ostream& out, const SpectrumGrid& s, SpectrumColumns cols = {}) {
  out << "f,S";
  if (cols.log_s) out << ",log_S";
  if (cols.inv_s) out << ",inv_S";
  out << '\n';
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double v = s[k];
    out << format_number(s.frequency(k)) << ',' << format_number(v);
    if (cols.log_s) out << ',' << format_number(v > 0.0 ? std::log(v) : -INFINITY);
    if (cols.inv_s) out << ',' << format_number(v > 0.0 ? 1.0 / v : INFINITY);
    out << '\n';
  }
}

}  // namespace tinspec::io

#include "ising/results.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "ising/common.hpp"

namespace ising {

namespace {

void check_row(const ResultRecord& r) {
  for (const std::string* s : {&r.experiment, &r.params, &r.observable, &r.provenance}) {
    if (s->find(',') != std::string::npos || s->find('\n') != std::string::npos) {
      throw std::invalid_argument("result fields must not contain commas or newlines");
    }
  }
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace

std::string to_csv(const std::vector<ResultRecord>& rows) {
  std::string out = kCsvHeader;
  out += "\n";
  for (const auto& r : rows) {
    check_row(r);
    out += r.experiment;
    out += ",";
    out += r.params;
    out += ",";
    out += r.observable;
    out += ",";
    out += format_g17(r.value);
    out += ",";
    if (r.has_err) out += format_g17(r.err);
    out += ",";
    out += r.provenance;
    out += ",";
    out += format_g17(r.seconds);
    out += "\n";
  }
  return out;
}

std::string to_json(const std::vector<ResultRecord>& rows) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += "  {\"experiment\":\"" + json_escape(r.experiment) + "\",";
    out += "\"params\":\"" + json_escape(r.params) + "\",";
    out += "\"observable\":\"" + json_escape(r.observable) + "\",";
    out += "\"value\":" + format_g17(r.value) + ",";
    out += "\"stderr\":";
    out += r.has_err ? format_g17(r.err) : std::string("null");
    out += ",";
    out += "\"provenance\":\"" + json_escape(r.provenance) + "\",";
    out += "\"seconds\":" + format_g17(r.seconds) + "}";
    if (i + 1 < rows.size()) out += ",";
    out += "\n";
  }
  out += "]\n";
  return out;
}

void emit_results(const std::vector<ResultRecord>& rows, const std::string& format,
                  const std::string& path) {
  if (rows.empty()) throw std::runtime_error("experiment produced no results");
  std::string text;
  if (format == "csv") {
    text = to_csv(rows);
  } else if (format == "json") {
    text = to_json(rows);
  } else {
    throw std::invalid_argument("format must be csv or json");
  }
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + path);
    f << text;
    if (!f) throw std::runtime_error("failed writing output file " + path);
  }
}

}  // namespace ising

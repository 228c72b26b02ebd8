// Copyright 2026 The pathtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pathtomo/records.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pathtomo/errors.hpp"

namespace pathtomo {

namespace {

constexpr const char* kHeader =
    "pairKind,phaseBinCenter,normalizedRate,sigma,acquisitionWeight";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const char* what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw ParseError("");
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("bad ") + what + " field '" + s + "' in records CSV");
  }
}

}  // namespace

bool is_phase_dependent(RateKind kind) {
  return kind == RateKind::r33 || kind == RateKind::r34 || kind == RateKind::r35 ||
         kind == RateKind::r45;
}

bool is_auto_kind(RateKind kind) {
  return kind == RateKind::r00 || kind == RateKind::r11 || kind == RateKind::r33;
}

std::string to_string(RateKind kind) {
  switch (kind) {
    case RateKind::r00: return "R00";
    case RateKind::r01: return "R01";
    case RateKind::r11: return "R11";
    case RateKind::r33: return "R33";
    case RateKind::r34: return "R34";
    case RateKind::r35: return "R35";
    case RateKind::r45: return "R45";
  }
  throw InternalError("unreachable rate kind");
}

RateKind rate_kind_from_string(const std::string& s) {
  for (RateKind k : kAllRateKinds)
    if (to_string(k) == s) return k;
  throw ParseError("unknown pairKind '" + s + "'");
}

void write_records_csv(std::ostream& out, const std::vector<MeasurementRecord>& records) {
  out << kHeader << "\n";
  for (const auto& r : records) {
    out << to_string(r.kind) << ',';
    if (r.phase) out << fmt(*r.phase);
    out << ',' << fmt(r.value) << ',' << fmt(r.sigma) << ',' << fmt(r.weight) << "\n";
  }
}

void write_records_csv(const std::string& path, const std::vector<MeasurementRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_records_csv(out, records);
}

std::vector<MeasurementRecord> read_records_csv(std::istream& in) {
  std::string line;
  bool have_header = false;
  std::vector<MeasurementRecord> records;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!have_header) {
      if (split_fields(line) != split_fields(kHeader))
        throw ParseError("records CSV header mismatch, expected '" +
                         std::string(kHeader) + "'");
      have_header = true;
      continue;
    }
    auto fields = split_fields(line);
    if (fields.size() != 5)
      throw ParseError("records CSV row with " + std::to_string(fields.size()) +
                       " fields (expected 5): '" + line + "'");
    MeasurementRecord r;
    r.kind = rate_kind_from_string(fields[0]);
    if (!fields[1].empty()) r.phase = parse_double(fields[1], "phaseBinCenter");
    if (r.phase.has_value() != is_phase_dependent(r.kind))
      throw ParseError("phase field inconsistent with pairKind " + fields[0]);
    r.value = parse_double(fields[2], "normalizedRate");
    r.sigma = parse_double(fields[3], "sigma");
    r.weight = parse_double(fields[4], "acquisitionWeight");
    if (!(r.sigma > 0.0)) throw ParseError("sigma must be positive");
    records.push_back(r);
  }
  if (!have_header) throw ParseError("records CSV is empty");
  return records;
}

std::vector<MeasurementRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return read_records_csv(in);
}

}  // namespace pathtomo

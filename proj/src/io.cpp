// Copyright 2026 The nbuplift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nbuplift/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "nbuplift/errors.hpp"

namespace nbuplift::io {
namespace {

constexpr std::string_view kScorePrefix = "score_";

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (const char c : line) {
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Reads the next non-comment, non-blank line. line_no tracks file lines.
bool NextRecord(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    return true;
  }
  return false;
}

[[noreturn]] void RowError(std::size_t line_no, const std::string& what) {
  throw SchemaError("line " + std::to_string(line_no) + ": " + what);
}

std::int64_t ParseInt(const std::string& raw, std::size_t line_no,
                      const char* column) {
  const std::string s = Trim(raw);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    RowError(line_no, std::string("invalid integer in column '") + column +
                          "': '" + raw + "'");
  }
  return v;
}

double ParseDouble(const std::string& raw, std::size_t line_no,
                   const std::string& column) {
  const std::string s = Trim(raw);
  if (s.empty()) RowError(line_no, "empty value in column '" + column + "'");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) {
    RowError(line_no, "invalid number in column '" + column + "': '" + raw + "'");
  }
  return v;
}

void WriteComments(std::ostream& out, const Comments& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
}

std::string OptionalField(const Gain& g) {
  return g ? FormatDouble(*g) : std::string();
}

}  // namespace

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Fnv1aHex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Dataset ReadDataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!NextRecord(in, line, line_no)) throw SchemaError("dataset file is empty");
  const auto header = SplitCsv(line);
  if (header.size() < 4 || Trim(header[0]) != "id" ||
      Trim(header[1]) != "treatment" || Trim(header[2]) != "outcome") {
    RowError(line_no,
             "header must be id,treatment,outcome,score_1,...[,observed]");
  }
  std::vector<std::string> models;
  bool has_observed = false;
  for (std::size_t c = 3; c < header.size(); ++c) {
    const std::string name = Trim(header[c]);
    if (name == "observed" && c + 1 == header.size()) {
      has_observed = true;
    } else if (name.rfind(kScorePrefix, 0) == 0 && name.size() > kScorePrefix.size()) {
      models.push_back(name.substr(kScorePrefix.size()));
    } else {
      RowError(line_no, "unexpected column '" + name + "'");
    }
  }
  if (models.empty()) RowError(line_no, "no score_ columns");
  const std::size_t width = header.size();

  std::vector<std::int64_t> ids;
  std::vector<std::uint8_t> treatment, observed;
  std::vector<double> outcome;
  std::vector<std::vector<double>> scores(models.size());
  while (NextRecord(in, line, line_no)) {
    const auto f = SplitCsv(line);
    if (f.size() != width) {
      RowError(line_no, "expected " + std::to_string(width) + " fields, got " +
                            std::to_string(f.size()));
    }
    ids.push_back(ParseInt(f[0], line_no, "id"));
    const std::int64_t t = ParseInt(f[1], line_no, "treatment");
    if (t != 0 && t != 1) RowError(line_no, "treatment must be 0 or 1");
    treatment.push_back(static_cast<std::uint8_t>(t));
    bool obs = true;
    if (has_observed) {
      const std::int64_t o = ParseInt(f[width - 1], line_no, "observed");
      if (o != 0 && o != 1) RowError(line_no, "observed must be 0 or 1");
      obs = o == 1;
    }
    observed.push_back(obs ? 1 : 0);
    if (!obs && Trim(f[2]).empty()) {
      outcome.push_back(std::numeric_limits<double>::quiet_NaN());
    } else {
      outcome.push_back(ParseDouble(f[2], line_no, "outcome"));
    }
    for (std::size_t s = 0; s < models.size(); ++s) {
      scores[s].push_back(ParseDouble(f[3 + s], line_no, "score_" + models[s]));
    }
  }
  if (ids.empty()) throw SchemaError("dataset has a header but no rows");
  try {
    return Dataset::FromColumns(std::move(models), std::move(ids),
                                std::move(treatment), std::move(outcome),
                                std::move(scores), std::move(observed));
  } catch (const ArgumentError& e) {
    throw SchemaError(e.what());
  }
}

Dataset ReadDatasetFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open dataset file '" + path + "'");
  return ReadDataset(in);
}

void WriteDataset(std::ostream& out, const Dataset& data,
                  const Comments& comments) {
  WriteComments(out, comments);
  out << "id,treatment,outcome";
  for (const auto& m : data.model_names()) out << ",score_" << m;
  out << ",observed\n";
  const auto ids = data.ids();
  const auto t = data.treatment();
  const auto y = data.outcome();
  const auto obs = data.observed();
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << ids[i] << ',' << int{t[i]} << ',';
    if (obs[i]) out << FormatDouble(y[i]);
    for (std::size_t s = 0; s < data.model_count(); ++s) {
      out << ',' << FormatDouble(data.scores(s)[i]);
    }
    out << ',' << int{obs[i]} << '\n';
  }
}

void WriteCurve(std::ostream& out, const UpliftCurve& curve,
                const Comments& comments) {
  WriteComments(out, comments);
  out << "percentile,k,gain,qini,mean_uplift\n";
  for (std::size_t g = 0; g < curve.size(); ++g) {
    out << FormatDouble(curve.grid[g].percentile) << ',' << curve.grid[g].k
        << ',' << OptionalField(curve.gains[g]) << ','
        << (g < curve.qini.size() ? OptionalField(curve.qini[g]) : std::string())
        << ',' << OptionalField(curve.MeanUplift(g)) << '\n';
  }
}

void WriteChosenSet(std::ostream& out, const ChosenSet& chosen,
                    const Comments& comments) {
  WriteComments(out, comments);
  out << "id,provenance,sub_universe,p_inclusion\n";
  char buf[40];
  for (const auto& m : chosen.members) {
    std::snprintf(buf, sizeof(buf), "%.17e", m.p_inclusion);
    out << m.id << ',' << (m.provenance == Provenance::kSrs ? "SRS" : "RANKED")
        << ',';
    if (m.provenance == Provenance::kRanked) out << m.sub_universe + 1;
    out << ',' << buf << '\n';
  }
}

std::vector<ChosenRow> ReadChosenSet(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!NextRecord(in, line, line_no)) throw SchemaError("chosen-set file is empty");
  const auto header = SplitCsv(line);
  int col_id = -1, col_prov = -1, col_sub = -1, col_p = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = Trim(header[c]);
    const int ci = static_cast<int>(c);
    if (name == "id") col_id = ci;
    if (name == "provenance") col_prov = ci;
    if (name == "sub_universe") col_sub = ci;
    if (name == "p_inclusion") col_p = ci;
  }
  if (col_id < 0) RowError(line_no, "chosen-set header lacks an id column");
  if (col_p < 0) {
    throw SchemaError(
        "chosen-set file has no p_inclusion column; run `nbuplift sample` to "
        "produce one, or recompute it by passing the population ranks and "
        "design to `nbuplift sample`");
  }
  std::vector<ChosenRow> rows;
  while (NextRecord(in, line, line_no)) {
    const auto f = SplitCsv(line);
    if (f.size() != header.size()) {
      RowError(line_no, "expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(f.size()));
    }
    ChosenRow row;
    row.id = ParseInt(f[col_id], line_no, "id");
    if (col_prov >= 0) {
      const std::string p = Trim(f[col_prov]);
      if (p == "SRS") {
        row.provenance = Provenance::kSrs;
      } else if (p == "RANKED") {
        row.provenance = Provenance::kRanked;
      } else {
        RowError(line_no, "provenance must be SRS or RANKED");
      }
    }
    if (col_sub >= 0 && !Trim(f[col_sub]).empty()) {
      row.sub_universe =
          static_cast<int>(ParseInt(f[col_sub], line_no, "sub_universe")) - 1;
    }
    if (Trim(f[col_p]).empty()) {
      RowError(line_no, "empty p_inclusion; rerun `nbuplift sample`");
    }
    const double p = ParseDouble(f[col_p], line_no, "p_inclusion");
    if (!(p > 0.0 && p <= 1.0)) RowError(line_no, "p_inclusion outside (0, 1]");
    row.p_inclusion = p;
    rows.push_back(row);
  }
  if (rows.empty()) throw SchemaError("chosen-set file has no rows");
  return rows;
}

std::vector<ChosenRow> ReadChosenSetFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open chosen-set file '" + path + "'");
  return ReadChosenSet(in);
}

void WriteBands(std::ostream& out, const std::vector<NamedBand>& bands,
                const Comments& comments) {
  WriteComments(out, comments);
  out << "model,percentile,k,lower,median,upper\n";
  for (const auto& nb : bands) {
    for (std::size_t g = 0; g < nb.band.points.size(); ++g) {
      const auto& p = nb.band.points[g];
      out << nb.model << ',' << FormatDouble(nb.band.grid[g].percentile) << ','
          << nb.band.grid[g].k << ',';
      if (!p.missing) {
        out << FormatDouble(p.lower) << ',' << FormatDouble(p.median) << ','
            << FormatDouble(p.upper);
      } else {
        out << ",,";
      }
      out << '\n';
    }
  }
}

Verdict Classify(const BandPoint& point) {
  if (point.missing) return Verdict::kMissing;
  if (point.lower > 0.0) return Verdict::kAboveZero;
  if (point.upper < 0.0) return Verdict::kBelowZero;
  return Verdict::kInconclusive;
}

const char* VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kAboveZero:
      return "ABOVE_ZERO";
    case Verdict::kBelowZero:
      return "BELOW_ZERO";
    case Verdict::kInconclusive:
      return "INCONCLUSIVE";
    case Verdict::kMissing:
      return "MISSING";
  }
  return "MISSING";
}

void WriteDifferenceBand(std::ostream& out, const std::string& model_a,
                         const std::string& model_b, const CurveBand& band,
                         const Comments& comments) {
  WriteComments(out, comments);
  out << "model_a,model_b,percentile,k,lower,median,upper,verdict\n";
  for (std::size_t g = 0; g < band.points.size(); ++g) {
    const auto& p = band.points[g];
    out << model_a << ',' << model_b << ','
        << FormatDouble(band.grid[g].percentile) << ',' << band.grid[g].k << ',';
    if (!p.missing) {
      out << FormatDouble(p.lower) << ',' << FormatDouble(p.median) << ','
          << FormatDouble(p.upper);
    } else {
      out << ",,";
    }
    out << ',' << VerdictName(Classify(p)) << '\n';
  }
}

void WriteEnsemble(std::ostream& out, const CurveEnsemble& ensemble,
                   const Comments& comments) {
  WriteComments(out, comments);
  out << "model,b,percentile,gain\n";
  for (std::size_t s = 0; s < ensemble.model_count(); ++s) {
    for (std::size_t b = 0; b < ensemble.curves[s].size(); ++b) {
      const auto& c = ensemble.curves[s][b];
      for (std::size_t g = 0; g < c.size(); ++g) {
        out << ensemble.model_names[s] << ',' << b + 1 << ','
            << FormatDouble(c.grid[g].percentile) << ','
            << OptionalField(c.gains[g]) << '\n';
      }
    }
  }
}

void WriteCoverage(std::ostream& out, const std::vector<CoverageReport>& reports,
                   const Comments& comments) {
  WriteComments(out, comments);
  out << "scenario,N,treat_ratio,percentile,model1_cov,model2_cov,diff_cov,"
         "model1_bias,model1_se,model2_bias,model2_se,diff_bias,diff_se,"
         "model1_missing,model2_missing,diff_missing\n";
  for (const auto& rep : reports) {
    for (const auto& r : rep.rows) {
      out << rep.scenario.id << ',' << r.population_size << ','
          << FormatDouble(rep.scenario.treat_ratio) << ','
          << FormatDouble(r.percentile) << ',' << FormatDouble(r.model1_cov)
          << ',' << FormatDouble(r.model2_cov) << ',' << FormatDouble(r.diff_cov)
          << ',' << FormatDouble(r.model1_bias) << ','
          << FormatDouble(r.model1_se) << ',' << FormatDouble(r.model2_bias)
          << ',' << FormatDouble(r.model2_se) << ',' << FormatDouble(r.diff_bias)
          << ',' << FormatDouble(r.diff_se) << ',' << r.model1_missing << ','
          << r.model2_missing << ',' << r.diff_missing << '\n';
    }
  }
}

std::string DesignToJson(const SamplingDesign& design, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["N"] = design.population_size;
  j["n"] = design.sample_size;
  j["n_r"] = design.srs_size;
  j["S0"] = design.sub_sizes.size();
  j["sub_sizes"] = design.sub_sizes;
  j["seed"] = seed;
  return j.dump(2);
}

SamplingDesign DesignFromJson(const std::string& text, std::uint64_t* seed) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("invalid design JSON: ") + e.what());
  }
  SamplingDesign d;
  try {
    d.population_size = j.at("N").get<std::int64_t>();
    d.sample_size = j.at("n").get<std::int64_t>();
    d.srs_size = j.at("n_r").get<std::int64_t>();
    if (j.contains("sub_sizes")) {
      d.sub_sizes = j.at("sub_sizes").get<std::vector<std::int64_t>>();
    }
    if (j.contains("S0")) {
      const auto s0 = j.at("S0").get<std::size_t>();
      if (d.sub_sizes.empty()) {
        d.sub_sizes = EqualSubSizes(d.population_size, d.srs_size, s0);
      } else if (d.sub_sizes.size() != s0) {
        throw SchemaError("design JSON: S0 does not match sub_sizes length");
      }
    }
    if (d.sub_sizes.empty()) d.sub_sizes = {d.population_size - d.srs_size};
    if (seed && j.contains("seed")) *seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("design JSON: ") + e.what());
  }
  return d;
}

}  // namespace nbuplift::io

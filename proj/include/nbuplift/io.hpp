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

#ifndef NBUPLIFT_IO_HPP_
#define NBUPLIFT_IO_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nbuplift/bootstrap.hpp"
#include "nbuplift/coverage.hpp"
#include "nbuplift/curve.hpp"
#include "nbuplift/design.hpp"

namespace nbuplift::io {

// Lines starting with '#' are comments in every CSV this library reads.
// Writers put each `comments` entry on its own "# " line before the header.
using Comments = std::vector<std::string>;

// Round-trippable decimal for a double ("%.17g"); NaN becomes an empty field.
std::string FormatDouble(double v);

// FNV-1a 64-bit, rendered as 16 hex digits.
std::string Fnv1aHex(const std::string& text);

// id,treatment,outcome,score_<name>...[,observed]
// The outcome may be empty only on rows with observed = 0.
Dataset ReadDataset(std::istream& in);
Dataset ReadDatasetFile(const std::string& path);
void WriteDataset(std::ostream& out, const Dataset& data,
                  const Comments& comments = {});

// percentile,k,gain,qini,mean_uplift
void WriteCurve(std::ostream& out, const UpliftCurve& curve,
                const Comments& comments = {});

// id,provenance,sub_universe,p_inclusion
// provenance is SRS or RANKED; sub_universe is 1-based and empty for SRS.
struct ChosenRow {
  std::int64_t id = 0;
  Provenance provenance = Provenance::kSrs;
  int sub_universe = -1;
  std::optional<double> p_inclusion;
};
void WriteChosenSet(std::ostream& out, const ChosenSet& chosen,
                    const Comments& comments = {});
// Throws SchemaError if the p_inclusion column is absent or empty.
std::vector<ChosenRow> ReadChosenSet(std::istream& in);
std::vector<ChosenRow> ReadChosenSetFile(const std::string& path);

// model,percentile,k,lower,median,upper
struct NamedBand {
  std::string model;
  CurveBand band;
};
void WriteBands(std::ostream& out, const std::vector<NamedBand>& bands,
                const Comments& comments = {});

enum class Verdict { kAboveZero, kBelowZero, kInconclusive, kMissing };
Verdict Classify(const BandPoint& point);
const char* VerdictName(Verdict v);

// model_a,model_b,percentile,k,lower,median,upper,verdict
void WriteDifferenceBand(std::ostream& out, const std::string& model_a,
                         const std::string& model_b, const CurveBand& band,
                         const Comments& comments = {});

// model,b,percentile,gain
void WriteEnsemble(std::ostream& out, const CurveEnsemble& ensemble,
                   const Comments& comments = {});

// scenario,N,treat_ratio,percentile, then coverage, bias and SE per model and
// for the difference, then per-band missing counts. Undefined values are empty.
void WriteCoverage(std::ostream& out, const std::vector<CoverageReport>& reports,
                   const Comments& comments = {});

// {"N", "n", "n_r", "S0", "sub_sizes", "seed"}
std::string DesignToJson(const SamplingDesign& design, std::uint64_t seed);
SamplingDesign DesignFromJson(const std::string& text,
                              std::uint64_t* seed = nullptr);

}  // namespace nbuplift::io

#endif  // NBUPLIFT_IO_HPP_

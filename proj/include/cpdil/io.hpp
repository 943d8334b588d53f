#pragma once

#include <map>
#include <string>
#include <utility>

#include "json.hpp"

#include "cpdil/dilate.hpp"
#include "cpdil/extend.hpp"

namespace cpdil::io {

using nlohmann::json;

/// Conventions: a complex scalar is [re, im]; a matrix is a row-major nested
/// array; a channel file is {"dim": n, "kraus": [matrix...]} or
/// {"dim": n, "choi": matrix}; a generator file is
/// {"dim": n, "G": matrix, "jumps": [matrix...]}; a sample table is
/// {"dim": n, "samples": [{"num": k, "den": 2^j, "channel": ...}]}.
/// Malformed input raises SchemaError.

json complex_to_json(cplx z);
cplx complex_from_json(const json& j);

json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

json channel_to_json(const Channel& c, bool as_kraus = true);
Channel channel_from_json(const json& j);

json generator_to_json(const Generator& g);
Generator generator_from_json(const json& j);

json table_to_json(const SampledSemigroup& ss);
SampledSemigroup table_from_json(const json& j);

/// Dilation artifact: the inputs (generators), the Kolmogorov data (embedding
/// and creation blocks), and the manifest of verification residuals.
struct DilationFile {
    Generator r, s;
    int level = 0, radius = 0;
    int n_h = 0, dim_k = 0;
    CMatrix iota;
    std::map<std::pair<int, int>, CMatrix> creation;
    std::map<std::string, double> residuals;
};

json dilation_to_json(const DilationFile& d);
DilationFile dilation_from_json(const json& j);

/// File round-trip; read throws SchemaError on unreadable or unparsable input.
json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace cpdil::io

#include "cpdil/io.hpp"

#include <fstream>

namespace cpdil::io {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw SchemaError(what);
}

const json& field(const json& j, const char* key) {
    require(j.is_object() && j.contains(key), std::string("missing field \"") + key + "\"");
    return j.at(key);
}

int dim_field(const json& j) {
    const json& d = field(j, "dim");
    require(d.is_number_integer() && d.get<int>() > 0, "\"dim\" must be a positive integer");
    return d.get<int>();
}

}  // namespace

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
    require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
            "complex scalar must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const CMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix matrix_from_json(const json& j) {
    require(j.is_array() && !j.empty() && j[0].is_array(), "matrix must be nested arrays");
    const int rows = int(j.size()), cols = int(j[0].size());
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        require(j[size_t(i)].is_array() && int(j[size_t(i)].size()) == cols,
                "matrix rows must have equal length");
        for (int c = 0; c < cols; ++c) m(i, c) = complex_from_json(j[size_t(i)][size_t(c)]);
    }
    return m;
}

json channel_to_json(const Channel& c, bool as_kraus) {
    json out;
    out["dim"] = c.dim();
    if (as_kraus) {
        json ops = json::array();
        for (const CMatrix& t : c.minimal_kraus().ops) ops.push_back(matrix_to_json(t));
        out["kraus"] = std::move(ops);
    } else {
        out["choi"] = matrix_to_json(c.choi());
    }
    return out;
}

Channel channel_from_json(const json& j) {
    const int n = dim_field(j);
    if (j.contains("kraus")) {
        const json& ops = j.at("kraus");
        require(ops.is_array() && !ops.empty(), "\"kraus\" must be a nonempty array");
        std::vector<CMatrix> fam;
        for (const json& o : ops) {
            fam.push_back(matrix_from_json(o));
            require(fam.back().rows() == n && fam.back().cols() == n, "kraus operator shape");
        }
        return Channel::from_kraus(fam);
    }
    if (j.contains("choi")) {
        CMatrix c = matrix_from_json(j.at("choi"));
        require(c.rows() == n * n && c.cols() == n * n, "choi matrix shape");
        return Channel::from_choi(c);
    }
    throw SchemaError("channel needs \"kraus\" or \"choi\"");
}

json generator_to_json(const Generator& g) {
    json out;
    out["dim"] = g.dim;
    out["G"] = matrix_to_json(g.G);
    json jumps = json::array();
    for (const CMatrix& l : g.jumps) jumps.push_back(matrix_to_json(l));
    out["jumps"] = std::move(jumps);
    return out;
}

Generator generator_from_json(const json& j) {
    Generator g;
    g.dim = dim_field(j);
    g.G = matrix_from_json(field(j, "G"));
    require(g.G.rows() == g.dim && g.G.cols() == g.dim, "generator G shape");
    const json& jumps = field(j, "jumps");
    require(jumps.is_array(), "\"jumps\" must be an array");
    for (const json& l : jumps) {
        g.jumps.push_back(matrix_from_json(l));
        require(g.jumps.back().rows() == g.dim && g.jumps.back().cols() == g.dim, "jump shape");
    }
    return g;
}

json table_to_json(const SampledSemigroup& ss) {
    json out;
    out["dim"] = ss.n;
    json samples = json::array();
    for (const auto& [t, c] : ss.table) {
        json s;
        s["num"] = t.num;
        s["den"] = (long long)1 << t.log2den;
        s["channel"] = channel_to_json(c);
        samples.push_back(std::move(s));
    }
    out["samples"] = std::move(samples);
    return out;
}

SampledSemigroup table_from_json(const json& j) {
    SampledSemigroup ss;
    ss.n = dim_field(j);
    const json& samples = field(j, "samples");
    require(samples.is_array(), "\"samples\" must be an array");
    for (const json& s : samples) {
        const long long num = field(s, "num").get<long long>();
        const long long den = field(s, "den").get<long long>();
        require(den > 0 && (den & (den - 1)) == 0, "\"den\" must be a power of two");
        int log2den = 0;
        while (((long long)1 << log2den) < den) ++log2den;
        Channel c = channel_from_json(field(s, "channel"));
        require(c.dim() == ss.n, "sample dimension");
        ss.table.emplace(Dyadic(num, log2den), std::move(c));
    }
    return ss;
}

json dilation_to_json(const DilationFile& d) {
    json out;
    out["r_generator"] = generator_to_json(d.r);
    out["s_generator"] = generator_to_json(d.s);
    out["level"] = d.level;
    out["radius"] = d.radius;
    out["n_h"] = d.n_h;
    out["dim_k"] = d.dim_k;
    out["iota"] = matrix_to_json(d.iota);
    json vs = json::array();
    for (const auto& [p, v] : d.creation) {
        json entry;
        entry["k"] = p.first;
        entry["m"] = p.second;
        entry["matrix"] = matrix_to_json(v);
        vs.push_back(std::move(entry));
    }
    out["creation"] = std::move(vs);
    out["residuals"] = d.residuals;
    return out;
}

DilationFile dilation_from_json(const json& j) {
    DilationFile d;
    d.r = generator_from_json(field(j, "r_generator"));
    d.s = generator_from_json(field(j, "s_generator"));
    d.level = field(j, "level").get<int>();
    d.radius = field(j, "radius").get<int>();
    d.n_h = field(j, "n_h").get<int>();
    d.dim_k = field(j, "dim_k").get<int>();
    d.iota = matrix_from_json(field(j, "iota"));
    const json& vs = field(j, "creation");
    require(vs.is_array(), "\"creation\" must be an array");
    for (const json& entry : vs)
        d.creation.emplace(
            std::make_pair(field(entry, "k").get<int>(), field(entry, "m").get<int>()),
            matrix_from_json(field(entry, "matrix")));
    const json& res = field(j, "residuals");
    require(res.is_object(), "\"residuals\" must be an object");
    for (auto it = res.begin(); it != res.end(); ++it)
        d.residuals[it.key()] = it.value().get<double>();
    return d;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot read " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw SchemaError("malformed JSON in " + path);
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace cpdil::io

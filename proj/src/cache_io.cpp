#include "cpe/cache_io.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace cpe {

namespace {

constexpr std::array<char, 8> kMagic = {'C', 'P', 'E', 'D', 'I', 'C', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

struct Header {
    std::uint32_t record = 0;
    std::uint64_t n = 0;
    std::uint64_t p = 0;
    double spacing = 0.0;
    std::uint64_t checksum = 0;
};

std::uint64_t fnv1a(const std::vector<char>& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char b : bytes) {
        h ^= static_cast<unsigned char>(b);
        h *= 1099511628211ULL;
    }
    return h;
}

template <typename T>
void put(std::vector<char>& out, const T& value) {
    const char* raw = reinterpret_cast<const char*>(&value);
    out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T take(const std::vector<char>& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw std::runtime_error("cache payload truncated");
    T value;
    std::memcpy(&value, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return value;
}

void put_matrix(std::vector<char>& out, const CMatrix& m) {
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            put(out, static_cast<float>(m(r, c).real()));
            put(out, static_cast<float>(m(r, c).imag()));
        }
    }
}

CMatrix take_matrix(const std::vector<char>& in, std::size_t& pos, Index rows, Index cols) {
    CMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
            const float re = take<float>(in, pos);
            const float im = take<float>(in, pos);
            m(r, c) = Complex(re, im);
        }
    }
    return m;
}

void write_file(const std::string& path, const Header& header, const std::vector<char>& payload) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open cache file for writing: " + path);
    os.write(kMagic.data(), kMagic.size());
    os.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
    os.write(reinterpret_cast<const char*>(&header.record), sizeof(header.record));
    os.write(reinterpret_cast<const char*>(&header.n), sizeof(header.n));
    os.write(reinterpret_cast<const char*>(&header.p), sizeof(header.p));
    os.write(reinterpret_cast<const char*>(&header.spacing), sizeof(header.spacing));
    const std::uint64_t sum = fnv1a(payload);
    os.write(reinterpret_cast<const char*>(&sum), sizeof(sum));
    os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!os) throw std::runtime_error("failed writing cache file: " + path);
}

std::vector<char> read_file(const std::string& path, CacheRecord expected, Header& header) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open cache file: " + path);
    std::array<char, 8> magic{};
    std::uint32_t version = 0;
    is.read(magic.data(), magic.size());
    is.read(reinterpret_cast<char*>(&version), sizeof(version));
    is.read(reinterpret_cast<char*>(&header.record), sizeof(header.record));
    is.read(reinterpret_cast<char*>(&header.n), sizeof(header.n));
    is.read(reinterpret_cast<char*>(&header.p), sizeof(header.p));
    is.read(reinterpret_cast<char*>(&header.spacing), sizeof(header.spacing));
    is.read(reinterpret_cast<char*>(&header.checksum), sizeof(header.checksum));
    if (!is || magic != kMagic) throw std::runtime_error("not a cache file: " + path);
    if (version != kVersion) throw std::runtime_error("unsupported cache version");
    if (header.record != static_cast<std::uint32_t>(expected)) throw std::runtime_error("unexpected cache record type");
    std::vector<char> payload((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (fnv1a(payload) != header.checksum) throw std::runtime_error("cache checksum mismatch: " + path);
    return payload;
}

}  // namespace

void save_dictionary(const std::string& path, const ParametricDictionary& dict) {
    std::vector<char> payload;
    put(payload, static_cast<std::uint32_t>(dict.kind));
    put(payload, static_cast<std::uint32_t>(dict.redundancy));
    put_matrix(payload, dict.atoms);
    Header h{static_cast<std::uint32_t>(CacheRecord::dictionary), static_cast<std::uint64_t>(dict.rows()),
             static_cast<std::uint64_t>(dict.size()), dict.spacing, 0};
    write_file(path, h, payload);
}

ParametricDictionary load_dictionary(const std::string& path, const SignalModel& model) {
    Header h;
    const std::vector<char> payload = read_file(path, CacheRecord::dictionary, h);
    std::size_t pos = 0;
    const auto kind = static_cast<ModelKind>(take<std::uint32_t>(payload, pos));
    const auto redundancy = static_cast<int>(take<std::uint32_t>(payload, pos));
    if (kind != model.kind || static_cast<Index>(h.n) != model.grid.n) {
        throw std::runtime_error("cached dictionary does not match the signal model");
    }
    ParametricDictionary dict;
    dict.kind = kind;
    dict.model = model;
    dict.redundancy = redundancy;
    dict.spacing = h.spacing;
    const auto p = static_cast<Index>(h.p);
    dict.params = RVector::LinSpaced(p, 0.0, static_cast<double>(p - 1)) * h.spacing;
    dict.atoms = take_matrix(payload, pos, static_cast<Index>(h.n), p);
    return dict;
}

void save_arc_bases(const std::string& path, const ArcBasisSet& arcs) {
    std::vector<char> payload;
    put(payload, arcs.r);
    for (Index p = 0; p < arcs.size(); ++p) put(payload, arcs.theta(p));
    put_matrix(payload, arcs.c);
    put_matrix(payload, arcs.u);
    put_matrix(payload, arcs.v);
    Header h{static_cast<std::uint32_t>(CacheRecord::arc_bases), static_cast<std::uint64_t>(arcs.c.rows()),
             static_cast<std::uint64_t>(arcs.size()), arcs.spacing, 0};
    write_file(path, h, payload);
}

ArcBasisSet load_arc_bases(const std::string& path, const ParametricDictionary& dict) {
    Header h;
    const std::vector<char> payload = read_file(path, CacheRecord::arc_bases, h);
    if (static_cast<Index>(h.n) != dict.rows() || static_cast<Index>(h.p) != dict.size() ||
        std::abs(h.spacing - dict.spacing) > 1e-12 * std::abs(dict.spacing)) {
        throw std::runtime_error("cached arc bases do not match the dictionary");
    }
    const auto n = static_cast<Index>(h.n);
    const auto p = static_cast<Index>(h.p);
    std::size_t pos = 0;
    ArcBasisSet arcs;
    arcs.r = take<double>(payload, pos);
    arcs.theta.resize(p);
    for (Index i = 0; i < p; ++i) arcs.theta(i) = take<double>(payload, pos);
    arcs.c = take_matrix(payload, pos, n, p);
    arcs.u = take_matrix(payload, pos, n, p);
    arcs.v = take_matrix(payload, pos, n, p);
    arcs.params = dict.params;
    arcs.spacing = dict.spacing;
    return arcs;
}

void save_operator(const std::string& path, const MeasurementOperator& op) {
    std::vector<char> payload;
    put(payload, op.seed);
    put(payload, op.kappa);
    Header h{static_cast<std::uint32_t>(CacheRecord::op), static_cast<std::uint64_t>(op.cols()),
             static_cast<std::uint64_t>(op.rows()), 0.0, 0};
    write_file(path, h, payload);
}

MeasurementOperator load_operator(const std::string& path) {
    Header h;
    const std::vector<char> payload = read_file(path, CacheRecord::op, h);
    std::size_t pos = 0;
    const auto seed = take<std::uint64_t>(payload, pos);
    const auto kappa = take<double>(payload, pos);
    MeasurementOperator op = build_operator(static_cast<Index>(h.n), kappa, seed);
    if (static_cast<std::uint64_t>(op.rows()) != h.p) throw std::runtime_error("cached operator dimensions disagree");
    return op;
}

}  // namespace cpe

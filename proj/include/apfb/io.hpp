#pragma once
// Field persistence: a little-endian binary container and a text CSV variant.
//
// Binary layout ("APFB1" format):
//   magic "APFB1\n" | u32 ndims | u32 dims[ndims] | f64 h | f64 gamma
//   | f64 values[prod(dims)], row-major, first index fastest.
// All integers and floats little-endian.  The container stores grid shape
// and spacing only; node positions and the Dirichlet mask are conventions of
// the caller (the CLI re-derives both from its run configuration).

#include "apfb/field.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace apfb {

enum class IoErrorKind {
    open_failed,
    magic_mismatch,
    truncated,
    dim_overflow,
    malformed,
};

class IoError : public std::runtime_error {
  public:
    IoError(IoErrorKind k, const std::string& msg)
        : std::runtime_error(msg), kind_(k) {}
    IoErrorKind kind() const { return kind_; }

  private:
    IoErrorKind kind_;
};

namespace detail {

inline constexpr char kFieldMagic[6] = {'A', 'P', 'F', 'B', '1', '\n'};

// Node counts are ints and total storage must fit comfortably in memory;
// anything larger is treated as a corrupt header, not an allocation request.
inline constexpr std::uint64_t kMaxNodes = std::uint64_t(1) << 28;

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k)
        out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

inline void put_f64(std::string& out, double v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k)
        out.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
}

class ByteReader {
  public:
    ByteReader(const std::string& data, std::string path)
        : d_(data), path_(std::move(path)) {}

    void skip(std::size_t n, const char* what) {
        need(n, what);
        pos_ += n;
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int k = 3; k >= 0; --k)
            v = (v << 8) | static_cast<std::uint8_t>(d_[pos_ + k]);
        pos_ += 4;
        return v;
    }
    double f64(const char* what) {
        need(8, what);
        std::uint64_t bits = 0;
        for (int k = 7; k >= 0; --k)
            bits = (bits << 8) | static_cast<std::uint8_t>(d_[pos_ + k]);
        pos_ += 8;
        return std::bit_cast<double>(bits);
    }
    std::size_t remaining() const { return d_.size() - pos_; }

    void need(std::size_t n, const char* what) const {
        if (d_.size() - pos_ < n)
            throw IoError(IoErrorKind::truncated,
                          path_ + ": truncated while reading " + what +
                              " (have " + std::to_string(d_.size() - pos_) +
                              " of " + std::to_string(n) + " bytes)");
    }

  private:
    const std::string& d_;
    std::string path_;
    std::size_t pos_ = 0;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError(IoErrorKind::open_failed, path + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

inline void spew(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError(IoErrorKind::open_failed, path + ": cannot open for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw IoError(IoErrorKind::open_failed, path + ": write failed");
}

// %.17g round-trips every finite double exactly through text.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Field plus the potential exponent it was produced under.  gamma is part
/// of the container because a stored minimizer is meaningless without it.
struct StoredField {
    ScalarField field;
    double gamma = 1.0;
};

inline void write_field(const std::string& path, const ScalarField& f,
                        double gamma) {
    std::string out;
    out.reserve(38 + 8 * f.values.size());
    out.append(detail::kFieldMagic, sizeof detail::kFieldMagic);
    detail::put_u32(out, static_cast<std::uint32_t>(f.ndim));
    for (int d = 0; d < f.ndim; ++d)
        detail::put_u32(out, static_cast<std::uint32_t>(f.dims[d]));
    detail::put_f64(out, f.h);
    detail::put_f64(out, gamma);
    for (double v : f.values) detail::put_f64(out, v);
    detail::spew(path, out);
}

inline StoredField read_field(const std::string& path) {
    const std::string data = detail::slurp(path);
    detail::ByteReader r(data, path);
    r.need(sizeof detail::kFieldMagic, "magic");
    if (std::memcmp(data.data(), detail::kFieldMagic,
                    sizeof detail::kFieldMagic) != 0)
        throw IoError(IoErrorKind::magic_mismatch,
                      path + ": not an APFB1 field file (bad magic)");
    r.skip(sizeof detail::kFieldMagic, "magic");

    const std::uint32_t ndims = r.u32("ndims");
    if (ndims < 1 || ndims > 2)
        throw IoError(IoErrorKind::malformed,
                      path + ": unsupported ndims " + std::to_string(ndims));
    std::uint64_t total = 1;
    std::array<int, 2> dims{0, 1};
    for (std::uint32_t d = 0; d < ndims; ++d) {
        const std::uint32_t nd = r.u32("dims");
        if (nd < 2)
            throw IoError(IoErrorKind::malformed,
                          path + ": degenerate dimension " + std::to_string(nd));
        total *= nd;
        if (nd > detail::kMaxNodes || total > detail::kMaxNodes)
            throw IoError(IoErrorKind::dim_overflow,
                          path + ": dimensions overflow the node budget (" +
                              std::to_string(nd) + " per axis, cap " +
                              std::to_string(detail::kMaxNodes) + " total)");
        dims[d] = static_cast<int>(nd);
    }
    const double h = r.f64("h");
    const double gamma = r.f64("gamma");
    if (!(h > 0.0) || !std::isfinite(h))
        throw IoError(IoErrorKind::malformed,
                      path + ": nonpositive grid spacing " + detail::format_g17(h));

    StoredField sf;
    sf.gamma = gamma;
    ScalarField& f = sf.field;
    f.ndim = static_cast<int>(ndims);
    f.dims = dims;
    f.h = h;
    f.origin = {0.0, 0.0};
    r.need(8 * total, "payload");
    f.values.resize(total);
    for (std::uint64_t k = 0; k < total; ++k) f.values[k] = r.f64("payload");
    if (r.remaining() != 0)
        throw IoError(IoErrorKind::malformed,
                      path + ": " + std::to_string(r.remaining()) +
                          " trailing bytes after payload");

    // Default Dirichlet convention: the outer ring (endpoints in 1D).
    f.boundary_mask.assign(f.values.size(), 0);
    if (f.ndim == 1) {
        f.boundary_mask.front() = 1;
        f.boundary_mask.back() = 1;
    } else {
        for (int j = 0; j < f.dims[1]; ++j)
            for (int i = 0; i < f.dims[0]; ++i)
                if (i == 0 || j == 0 || i == f.dims[0] - 1 || j == f.dims[1] - 1)
                    f.boundary_mask[f.idx(i, j)] = 1;
    }
    return sf;
}

/// Text variant: '#'-prefixed metadata lines, then one value per line in
/// storage order.  Line 1 fixes shape/spacing/exponent; line 2 carries the
/// node-position convention, which the binary format does not.
inline void write_field_csv(const std::string& path, const ScalarField& f,
                            double gamma) {
    std::string out;
    out += "# dims=";
    out += std::to_string(f.dims[0]);
    if (f.ndim == 2) {
        out += "x";
        out += std::to_string(f.dims[1]);
    }
    out += ",h=" + detail::format_g17(f.h);
    out += ",gamma=" + detail::format_g17(gamma);
    out += "\n# origin=" + detail::format_g17(f.origin[0]) + "," +
           detail::format_g17(f.origin[1]) + "\n";
    for (double v : f.values) {
        out += detail::format_g17(v);
        out += "\n";
    }
    detail::spew(path, out);
}

inline StoredField read_field_csv(const std::string& path) {
    const std::string data = detail::slurp(path);
    std::istringstream in(data);
    std::string line;
    StoredField sf;
    ScalarField& f = sf.field;
    bool have_dims = false;
    std::vector<double> vals;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) -> IoError {
        return IoError(IoErrorKind::malformed,
                       path + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string meta = line.substr(1);
            std::istringstream ms(meta);
            std::string kv;
            while (std::getline(ms, kv, ',')) {
                const std::size_t eq = kv.find('=');
                if (eq == std::string::npos) continue;
                std::string key = kv.substr(0, eq);
                std::string val = kv.substr(eq + 1);
                key.erase(0, key.find_first_not_of(" \t"));
                key.erase(key.find_last_not_of(" \t") + 1);
                if (key == "dims") {
                    const std::size_t xpos = val.find('x');
                    try {
                        if (xpos == std::string::npos) {
                            f.ndim = 1;
                            f.dims = {std::stoi(val), 1};
                        } else {
                            f.ndim = 2;
                            f.dims = {std::stoi(val.substr(0, xpos)),
                                      std::stoi(val.substr(xpos + 1))};
                        }
                    } catch (const std::exception&) {
                        throw fail("malformed dims '" + val + "'");
                    }
                    if (f.dims[0] < 2 || f.dims[1] < 1)
                        throw fail("degenerate dims '" + val + "'");
                    have_dims = true;
                } else if (key == "h") {
                    f.h = std::strtod(val.c_str(), nullptr);
                } else if (key == "gamma") {
                    sf.gamma = std::strtod(val.c_str(), nullptr);
                } else if (key == "origin") {
                    const std::size_t comma = val.find(',');
                    f.origin[0] = std::strtod(val.c_str(), nullptr);
                    if (comma != std::string::npos)
                        f.origin[1] = std::strtod(val.c_str() + comma + 1, nullptr);
                }
            }
            continue;
        }
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str()) throw fail("not a number: '" + line + "'");
        vals.push_back(v);
    }
    if (!have_dims)
        throw IoError(IoErrorKind::malformed, path + ": missing '# dims=' header");
    if (!(f.h > 0.0))
        throw IoError(IoErrorKind::malformed, path + ": missing or bad h in header");
    const std::size_t want =
        static_cast<std::size_t>(f.dims[0]) * static_cast<std::size_t>(f.dims[1]);
    if (vals.size() != want)
        throw IoError(IoErrorKind::truncated,
                      path + ": expected " + std::to_string(want) + " values, got " +
                          std::to_string(vals.size()));
    f.values = std::move(vals);
    f.boundary_mask.assign(f.values.size(), 0);
    if (f.ndim == 1) {
        f.boundary_mask.front() = 1;
        f.boundary_mask.back() = 1;
    } else {
        for (int j = 0; j < f.dims[1]; ++j)
            for (int i = 0; i < f.dims[0]; ++i)
                if (i == 0 || j == 0 || i == f.dims[0] - 1 || j == f.dims[1] - 1)
                    f.boundary_mask[f.idx(i, j)] = 1;
    }
    return sf;
}

} // namespace apfb

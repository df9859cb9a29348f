#include "genmetrics/embed_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <vector>

namespace genmetrics {
namespace {

constexpr char kNpyMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};
constexpr char kRawbinMagic[4] = {'G', 'M', 'E', 'B'};

[[noreturn]] void bad_file(const std::filesystem::path& path, const std::string& what) {
    throw IoError(path.string() + ": " + what);
}

std::string read_all_or_throw(std::ifstream& in, const std::filesystem::path& path,
                              char* dst, std::size_t bytes, const char* what) {
    in.read(dst, static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes) {
        bad_file(path, std::string("truncated file while reading ") + what);
    }
    return {};
}

// Pulls the value of a python-dict-literal key out of an npy header string.
std::string header_value(const std::string& header, const std::string& key,
                         const std::filesystem::path& path) {
    auto pos = header.find("'" + key + "'");
    if (pos == std::string::npos) bad_file(path, "npy header missing key '" + key + "'");
    pos = header.find(':', pos);
    if (pos == std::string::npos) bad_file(path, "malformed npy header");
    ++pos;
    while (pos < header.size() && header[pos] == ' ') ++pos;
    std::size_t end = pos;
    if (header[pos] == '(') {
        end = header.find(')', pos);
        if (end == std::string::npos) bad_file(path, "malformed npy shape");
        ++end;
    } else if (header[pos] == '\'') {
        end = header.find('\'', pos + 1);
        if (end == std::string::npos) bad_file(path, "malformed npy descr");
        ++end;
    } else {
        end = header.find_first_of(",}", pos);
        if (end == std::string::npos) bad_file(path, "malformed npy header");
    }
    return header.substr(pos, end - pos);
}

EmbeddingSet load_npy(const std::filesystem::path& path, std::string label) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bad_file(path, "cannot open file");

    char magic[8];
    read_all_or_throw(in, path, magic, 8, "npy magic");
    if (std::memcmp(magic, kNpyMagic, 6) != 0) bad_file(path, "not an npy file (bad magic)");
    if (magic[6] != 1 || magic[7] != 0) {
        bad_file(path, "unsupported npy version (only v1.0 is accepted)");
    }

    unsigned char len_bytes[2];
    read_all_or_throw(in, path, reinterpret_cast<char*>(len_bytes), 2, "npy header length");
    const std::size_t header_len = len_bytes[0] | (std::size_t(len_bytes[1]) << 8);
    std::string header(header_len, '\0');
    read_all_or_throw(in, path, header.data(), header_len, "npy header");

    const std::string descr = header_value(header, "descr", path);
    const std::string fortran = header_value(header, "fortran_order", path);
    const std::string shape = header_value(header, "shape", path);

    if (fortran.rfind("False", 0) != 0) {
        bad_file(path, "fortran_order arrays are not supported");
    }
    bool f32;
    if (descr == "'<f4'") f32 = true;
    else if (descr == "'<f8'") f32 = false;
    else bad_file(path, "unsupported dtype " + descr + " (need '<f4' or '<f8')");

    // shape must be a 2-tuple "(N, D)"
    unsigned long long dims[2];
    int ndim = 0;
    const char* p = shape.c_str() + 1;
    while (*p != '\0' && *p != ')') {
        while (*p == ' ' || *p == ',') ++p;
        if (*p == ')' || *p == '\0') break;
        char* endp = nullptr;
        unsigned long long v = std::strtoull(p, &endp, 10);
        if (endp == p) bad_file(path, "malformed npy shape " + shape);
        if (ndim < 2) dims[ndim] = v;
        ++ndim;
        p = endp;
    }
    if (ndim != 2) {
        bad_file(path, "expected a 2-D array, got " + std::to_string(ndim) + "-D shape " + shape);
    }
    const Index n = static_cast<Index>(dims[0]);
    const Index d = static_cast<Index>(dims[1]);

    Matrix data(n, d);
    const std::size_t count = static_cast<std::size_t>(n) * static_cast<std::size_t>(d);
    if (f32) {
        std::vector<float> buf(count);
        read_all_or_throw(in, path, reinterpret_cast<char*>(buf.data()),
                          count * sizeof(float), "npy payload");
        std::copy(buf.begin(), buf.end(), data.data());
        return {std::move(data), std::move(label), DtypeOrigin::f32};
    }
    read_all_or_throw(in, path, reinterpret_cast<char*>(data.data()),
                      count * sizeof(double), "npy payload");
    return {std::move(data), std::move(label), DtypeOrigin::f64};
}

void save_npy(const EmbeddingSet& set, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) bad_file(path, "cannot open file for writing");

    const bool f32 = set.dtype_origin() == DtypeOrigin::f32;
    std::string header = std::string("{'descr': '") + (f32 ? "<f4" : "<f8") +
                         "', 'fortran_order': False, 'shape': (" +
                         std::to_string(set.n()) + ", " + std::to_string(set.dim()) + "), }";
    // pad with spaces so that 10 + len is a multiple of 64; newline-terminated
    std::size_t total = 10 + header.size() + 1;
    header.append((64 - total % 64) % 64, ' ');
    header.push_back('\n');

    out.write(kNpyMagic, 6);
    out.put('\x01');
    out.put('\x00');
    const std::size_t len = header.size();
    out.put(static_cast<char>(len & 0xff));
    out.put(static_cast<char>((len >> 8) & 0xff));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));

    const std::size_t count = static_cast<std::size_t>(set.n()) * set.dim();
    if (f32) {
        std::vector<float> buf(count);
        const double* src = set.data().data();
        for (std::size_t i = 0; i < count; ++i) buf[i] = static_cast<float>(src[i]);
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(count * sizeof(float)));
    } else {
        out.write(reinterpret_cast<const char*>(set.data().data()),
                  static_cast<std::streamsize>(count * sizeof(double)));
    }
    if (!out) bad_file(path, "write failure");
}

EmbeddingSet load_rawbin(const std::filesystem::path& path, std::string label) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bad_file(path, "cannot open file");

    char magic[4];
    read_all_or_throw(in, path, magic, 4, "rawbin magic");
    if (std::memcmp(magic, kRawbinMagic, 4) != 0) bad_file(path, "not a GMEB rawbin file");

    std::uint32_t hdr[3];
    read_all_or_throw(in, path, reinterpret_cast<char*>(hdr), 12, "rawbin header");
    const Index n = static_cast<Index>(hdr[0]);
    const Index d = static_cast<Index>(hdr[1]);
    const std::uint32_t dtype = hdr[2];
    if (dtype != 4 && dtype != 8) {
        bad_file(path, "bad rawbin dtype code " + std::to_string(dtype));
    }

    Matrix data(n, d);
    const std::size_t count = static_cast<std::size_t>(n) * static_cast<std::size_t>(d);
    if (dtype == 4) {
        std::vector<float> buf(count);
        read_all_or_throw(in, path, reinterpret_cast<char*>(buf.data()),
                          count * sizeof(float), "rawbin payload");
        std::copy(buf.begin(), buf.end(), data.data());
        return {std::move(data), std::move(label), DtypeOrigin::f32};
    }
    read_all_or_throw(in, path, reinterpret_cast<char*>(data.data()),
                      count * sizeof(double), "rawbin payload");
    return {std::move(data), std::move(label), DtypeOrigin::f64};
}

void save_rawbin(const EmbeddingSet& set, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) bad_file(path, "cannot open file for writing");

    const bool f32 = set.dtype_origin() == DtypeOrigin::f32;
    out.write(kRawbinMagic, 4);
    const std::uint32_t hdr[3] = {static_cast<std::uint32_t>(set.n()),
                                  static_cast<std::uint32_t>(set.dim()),
                                  f32 ? 4u : 8u};
    out.write(reinterpret_cast<const char*>(hdr), 12);

    const std::size_t count = static_cast<std::size_t>(set.n()) * set.dim();
    if (f32) {
        std::vector<float> buf(count);
        const double* src = set.data().data();
        for (std::size_t i = 0; i < count; ++i) buf[i] = static_cast<float>(src[i]);
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(count * sizeof(float)));
    } else {
        out.write(reinterpret_cast<const char*>(set.data().data()),
                  static_cast<std::streamsize>(count * sizeof(double)));
    }
    if (!out) bad_file(path, "write failure");
}

} // namespace

FileFormat parse_format(const std::string& name) {
    if (name == "npy") return FileFormat::npy;
    if (name == "rawbin") return FileFormat::rawbin;
    throw ValidationError("unknown embedding format '" + name + "' (expected npy or rawbin)");
}

FileFormat infer_format(const std::filesystem::path& path) {
    return path.extension() == ".npy" ? FileFormat::npy : FileFormat::rawbin;
}

EmbeddingSet load_embeddings(const std::filesystem::path& path, FileFormat format,
                             std::string label) {
    if (label.empty()) label = path.stem().string();
    return format == FileFormat::npy ? load_npy(path, std::move(label))
                                     : load_rawbin(path, std::move(label));
}

void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path,
                     FileFormat format) {
    if (format == FileFormat::npy) save_npy(set, path);
    else save_rawbin(set, path);
}

EmbeddingSet concat(const EmbeddingSet& a, const EmbeddingSet& b) {
    require_same_dim(a, b);
    Matrix out(a.n() + b.n(), a.dim());
    out.topRows(a.n()) = a.data();
    out.bottomRows(b.n()) = b.data();
    return {std::move(out), a.label(), a.dtype_origin()};
}

EmbeddingSet prefix_subsample(const EmbeddingSet& set, Index n) {
    if (n < 1 || n > set.n()) {
        throw ValidationError("subsample size " + std::to_string(n) +
                              " out of range [1, " + std::to_string(set.n()) + "]");
    }
    return {set.data().topRows(n), set.label(), set.dtype_origin()};
}

} // namespace genmetrics

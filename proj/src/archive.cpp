#include "clra/archive.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "clra/errors.hpp"

namespace clra {

namespace {

constexpr char kMagic[4] = {'C', 'L', 'R', 'A'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8)
        out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
}

void put_f32(std::vector<std::uint8_t>& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    put_u32(out, bits);
}

void put_f64(std::vector<std::uint8_t>& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    for (int shift = 0; shift < 64; shift += 8)
        out.push_back(static_cast<std::uint8_t>((bits >> shift) & 0xff));
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::uint16_t u16() {
        need(2);
        const std::uint16_t v = static_cast<std::uint16_t>(
            bytes_[pos_] | (static_cast<std::uint16_t>(bytes_[pos_ + 1]) << 8));
        pos_ += 2;
        return v;
    }

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b)
            v |= static_cast<std::uint32_t>(bytes_[pos_ + b]) << (8 * b);
        pos_ += 4;
        return v;
    }

    float f32() {
        const std::uint32_t bits = u32();
        float f;
        std::memcpy(&f, &bits, sizeof(f));
        return f;
    }

    double f64() {
        need(8);
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b)
            bits |= static_cast<std::uint64_t>(bytes_[pos_ + b]) << (8 * b);
        pos_ += 8;
        double d;
        std::memcpy(&d, &bits, sizeof(d));
        return d;
    }

    void expect_magic() {
        need(4);
        if (std::memcmp(bytes_.data() + pos_, kMagic, 4) != 0) {
            throw FormatError("archive: bad magic");
        }
        pos_ += 4;
    }

    bool exhausted() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) {
        if (pos_ + n > bytes_.size()) {
            throw FormatError("archive: truncated file");
        }
    }

    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_archive(const CompressedImage& image) {
    if (image.rows < 1 || image.cols < 1 || image.patch_size < 1 ||
        image.stride < 1 || image.clusters.empty()) {
        throw InvalidInput("archive: incomplete compressed image");
    }
    const auto p2 = static_cast<Eigen::Index>(image.patch_size) *
                    image.patch_size;
    for (const auto& c : image.clusters) {
        const auto n = static_cast<Eigen::Index>(c.positions.size());
        if (n < 1 || c.rank < 1 || c.factors.u.rows() != n ||
            c.factors.u.cols() != c.rank || c.factors.s.size() != c.rank ||
            c.factors.vt.rows() != c.rank || c.factors.vt.cols() != p2 ||
            !(c.beta >= 0.0 && c.beta < 1.0)) {
            throw InvalidInput("archive: inconsistent cluster payload");
        }
    }
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u16(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(image.rows));
    put_u32(out, static_cast<std::uint32_t>(image.cols));
    put_u32(out, static_cast<std::uint32_t>(image.patch_size));
    put_u32(out, static_cast<std::uint32_t>(image.stride));
    put_u32(out, static_cast<std::uint32_t>(image.clusters.size()));
    put_u32(out, static_cast<std::uint32_t>(std::lround(image.max_value)));

    for (const auto& c : image.clusters) {
        const auto n = static_cast<std::uint32_t>(c.positions.size());
        put_u32(out, n);
        put_u32(out, static_cast<std::uint32_t>(c.rank));
        put_f64(out, c.beta);
        for (const auto& pos : c.positions) {
            put_u32(out, static_cast<std::uint32_t>(pos.row));
            put_u32(out, static_cast<std::uint32_t>(pos.col));
        }
        for (Eigen::Index i = 0; i < c.factors.u.rows(); ++i)
            for (Eigen::Index j = 0; j < c.factors.u.cols(); ++j)
                put_f32(out, static_cast<float>(c.factors.u(i, j)));
        for (Eigen::Index i = 0; i < c.factors.s.size(); ++i)
            put_f32(out, static_cast<float>(c.factors.s[i]));
        for (Eigen::Index i = 0; i < c.factors.vt.rows(); ++i)
            for (Eigen::Index j = 0; j < c.factors.vt.cols(); ++j)
                put_f32(out, static_cast<float>(c.factors.vt(i, j)));
    }
    return out;
}

CompressedImage deserialize_archive(const std::vector<std::uint8_t>& bytes) {
    Reader in(bytes);
    in.expect_magic();
    const std::uint16_t version = in.u16();
    if (version != kVersion) {
        throw FormatError("archive: unsupported version " +
                          std::to_string(version));
    }

    CompressedImage image;
    image.rows = static_cast<int>(in.u32());
    image.cols = static_cast<int>(in.u32());
    image.patch_size = static_cast<int>(in.u32());
    image.stride = static_cast<int>(in.u32());
    const std::uint32_t k = in.u32();
    image.max_value = static_cast<double>(in.u32());

    if (image.rows < 1 || image.cols < 1 || image.patch_size < 1 ||
        image.patch_size > std::min(image.rows, image.cols) ||
        image.stride < 1 || image.stride > image.patch_size || k < 1) {
        throw FormatError("archive: inconsistent header");
    }

    const int p = image.patch_size;
    const Eigen::Index dim = static_cast<Eigen::Index>(p) * p;
    image.clusters.resize(k);
    for (std::uint32_t c = 0; c < k; ++c) {
        auto& cluster = image.clusters[c];
        const std::uint32_t n = in.u32();
        const std::uint32_t rank = in.u32();
        cluster.beta = in.f64();
        if (n < 1 || rank < 1 ||
            rank > std::min<std::uint32_t>(n, static_cast<std::uint32_t>(dim))) {
            throw FormatError("archive: cluster " + std::to_string(c) +
                              " has invalid patch count or rank");
        }
        if (!(cluster.beta >= 0.0) || cluster.beta >= 1.0) {
            throw FormatError("archive: cluster " + std::to_string(c) +
                              " has invalid overlap proportion");
        }
        cluster.rank = static_cast<int>(rank);
        cluster.positions.resize(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            const std::uint32_t row = in.u32();
            const std::uint32_t col = in.u32();
            if (row + p > static_cast<std::uint32_t>(image.rows) ||
                col + p > static_cast<std::uint32_t>(image.cols)) {
                throw FormatError("archive: patch position out of bounds");
            }
            cluster.positions[i] = {static_cast<int>(row),
                                    static_cast<int>(col)};
        }
        cluster.factors.rank = cluster.rank;
        cluster.factors.u.resize(n, rank);
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = 0; j < rank; ++j)
                cluster.factors.u(i, j) = static_cast<double>(in.f32());
        cluster.factors.s.resize(rank);
        for (std::uint32_t i = 0; i < rank; ++i)
            cluster.factors.s[i] = static_cast<double>(in.f32());
        cluster.factors.vt.resize(rank, dim);
        for (std::uint32_t i = 0; i < rank; ++i)
            for (Eigen::Index j = 0; j < dim; ++j)
                cluster.factors.vt(static_cast<Eigen::Index>(i), j) =
                    static_cast<double>(in.f32());
        cluster.n_eff = effective_patch_count(static_cast<int>(n), cluster.beta);
    }
    if (!in.exhausted()) {
        throw FormatError("archive: trailing bytes after the last cluster");
    }
    return image;
}

void write_archive(const std::string& path, const CompressedImage& image) {
    const auto bytes = serialize_archive(image);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("archive: cannot create " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("archive: write failed for " + path);
}

CompressedImage read_archive(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("archive: cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return deserialize_archive(bytes);
}

bool looks_like_archive(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    char head[4] = {0, 0, 0, 0};
    in.read(head, 4);
    return in && std::memcmp(head, kMagic, 4) == 0;
}

}  // namespace clra

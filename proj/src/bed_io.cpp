#include "bed/bed_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace bed {

namespace {

constexpr std::array<char, 4> kMagic{'B', 'E', 'D', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> bytes{};
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> bytes{};
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    out.write(bytes.data(), bytes.size());
}

std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

double get_f64(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
    if (v > std::numeric_limits<std::uint32_t>::max())
        throw DimMismatch(std::string(what) + " does not fit the BED1 header");
    return static_cast<std::uint32_t>(v);
}

}  // namespace

void write_matrix_batch(const BatchedMatrix& m, std::ostream& out) {
    if (m.data.size() != m.batch * m.rows * m.cols)
        throw DimMismatch("payload size does not match header dimensions");
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, kBedVersion);
    put_u32(out, checked_u32(m.batch, "batch"));
    put_u32(out, checked_u32(m.rows, "dim_rows"));
    put_u32(out, checked_u32(m.cols, "dim_cols"));
    for (double v : m.data) put_f64(out, v);
    if (!out) throw IoError("failed writing BED1 stream");
}

BatchedMatrix read_matrix_batch(std::istream& in) {
    std::array<unsigned char, kBedHeaderBytes> header{};
    in.read(reinterpret_cast<char*>(header.data()), header.size());
    if (in.gcount() < 4 || !std::equal(kMagic.begin(), kMagic.end(), header.begin(),
                                       [](char a, unsigned char b) { return a == static_cast<char>(b); }))
        throw BadMagic("stream does not start with BED1 magic");
    if (static_cast<std::size_t>(in.gcount()) < header.size())
        throw TruncatedPayload("BED1 header is truncated");
    const std::uint32_t version = get_u32(header.data() + 4);
    if (version != kBedVersion) throw BadMagic("unsupported BED1 version " + std::to_string(version));

    const std::size_t batch = get_u32(header.data() + 8);
    const std::size_t rows = get_u32(header.data() + 12);
    const std::size_t cols = get_u32(header.data() + 16);
    const std::size_t per_matrix = rows * cols;
    if (per_matrix != 0 && batch > std::numeric_limits<std::size_t>::max() / 8 / per_matrix)
        throw DimMismatch("BED1 header dimensions overflow");
    const std::size_t count = batch * per_matrix;

    std::vector<double> values;
    values.reserve(std::min<std::size_t>(count, std::size_t{1} << 20));
    std::array<unsigned char, 8> buf{};
    for (std::size_t i = 0; i < count; ++i) {
        in.read(reinterpret_cast<char*>(buf.data()), buf.size());
        if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
            throw TruncatedPayload("BED1 header claims " + std::to_string(count) +
                                   " values but the payload holds " + std::to_string(i));
        }
        values.push_back(get_f64(buf.data()));
    }
    if (in.peek() != std::char_traits<char>::eof())
        throw DimMismatch("BED1 payload is longer than the header dimensions");
    return BatchedMatrix(batch, rows, cols, std::move(values));
}

void write_batch(const BatchedSymmetric& a, std::ostream& out) {
    write_matrix_batch(a.to_matrix(), out);
}

BatchedSymmetric read_batch(std::istream& in) {
    return BatchedSymmetric::from_matrix(read_matrix_batch(in));
}

BatchedMatrix load_matrix_batch(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return read_matrix_batch(in);
}

void save_matrix_batch(const BatchedMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write_matrix_batch(m, out);
    out.flush();
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace bed

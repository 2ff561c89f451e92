#include "formbound/field_io.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "formbound/errors.hpp"

namespace formbound {

namespace {

constexpr char magic[5] = {'F', 'B', 'N', 'D', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 8);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(os, bits);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

double get_f64(std::istream& is) {
    const std::uint64_t bits = get_u64(is);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void write_fbnd(const ScalarField& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("write_fbnd: cannot open " + path);
    os.write(magic, 5);
    put_u64(os, static_cast<std::uint64_t>(f.grid()->dim()));
    put_u64(os, static_cast<std::uint64_t>(f.grid()->n()));
    put_f64(os, f.grid()->edge());
    for (std::size_t i = 0; i < f.size(); ++i) put_f64(os, f[i]);
    if (!os) throw IoError("write_fbnd: write failed for " + path);
}

ScalarField read_fbnd(const std::string& path, std::size_t memory_budget) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("read_fbnd: cannot open " + path);
    char head[5];
    is.read(head, 5);
    if (!is || std::memcmp(head, magic, 5) != 0)
        throw IoError("read_fbnd: bad magic in " + path);
    const auto d = static_cast<int>(get_u64(is));
    const auto n = static_cast<int>(get_u64(is));
    const double L = get_f64(is);
    GridPtr grid = make_grid(d, n, L, memory_budget);
    std::vector<double> values(grid->size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = get_f64(is);
    if (!is) throw IoError("read_fbnd: truncated file " + path);
    return ScalarField(std::move(grid), std::move(values));
}

void write_csv(const ScalarField& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("write_csv: cannot open " + path);
    const int d = f.grid()->dim();
    const int n = f.grid()->n();
    for (int j = 0; j < d; ++j) os << "i" << j << ",";
    os << "value\n";
    os.precision(17);
    std::vector<int> idx(d, 0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (int j = 0; j < d; ++j) os << idx[j] << ",";
        os << f[i] << "\n";
        for (int j = d - 1; j >= 0; --j) {
            if (++idx[j] < n) break;
            idx[j] = 0;
        }
    }
}

}  // namespace formbound

#include "sparareal/grid_paths.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "sparareal/philox.hpp"

namespace sparareal {

TimeGrid build_grid(double T, std::size_t N, std::size_t M) {
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("build_grid: T must be positive and finite");
    if (N == 0) throw std::invalid_argument("build_grid: N must be at least 1");
    if (M == 0) throw std::invalid_argument("build_grid: M must be at least 1");
    TimeGrid grid;
    grid.T = T;
    grid.N = N;
    grid.M = M;
    grid.dT = T / static_cast<double>(N);
    grid.dt = grid.dT / static_cast<double>(M);
    return grid;
}

namespace {

std::vector<double> derive_coarse(const TimeGrid& grid, std::size_t n_paths, const std::vector<double>& fine) {
    std::vector<double> coarse(n_paths * grid.N);
    const double scale = 1.0 / std::sqrt(static_cast<double>(grid.M));
    for (std::size_t row = 0; row < coarse.size(); ++row) {
        double sum = 0.0;
        for (std::size_t j = 0; j < grid.M; ++j) sum += fine[row * grid.M + j];
        coarse[row] = scale * sum;
    }
    return coarse;
}

}  // namespace

BrownianTable::BrownianTable(const TimeGrid& grid, std::uint64_t seed, std::size_t n_paths, std::vector<double> fine)
    : grid_(grid), seed_(seed), n_paths_(n_paths), fine_(std::move(fine)) {
    coarse_ = derive_coarse(grid_, n_paths_, fine_);
}

BrownianTable BrownianTable::generate(const TimeGrid& grid, std::uint64_t seed, std::size_t n_paths,
                                      const Execution& exec) {
    if (n_paths == 0) throw std::invalid_argument("generate_brownian_table: n_paths must be at least 1");
    const KeyedStream stream(seed, StreamDomain::brownian);
    const std::size_t per_path = grid.N * grid.M;
    std::vector<double> fine(n_paths * per_path);
    parallel_for(n_paths, exec, [&](std::size_t path) {
        double* row = fine.data() + path * per_path;
        for (std::size_t n = 0; n < grid.N; ++n) {
            for (std::size_t j = 0; j < grid.M; ++j) {
                row[n * grid.M + j] =
                    stream.normal(path, static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(j));
            }
        }
    });
    return BrownianTable(grid, seed, n_paths, std::move(fine));
}

BrownianTable BrownianTable::from_fine_normals(const TimeGrid& grid, std::uint64_t seed, std::size_t n_paths,
                                               std::vector<double> fine_normals) {
    if (n_paths == 0) throw std::invalid_argument("BrownianTable: n_paths must be at least 1");
    if (fine_normals.size() != n_paths * grid.N * grid.M) {
        throw std::invalid_argument("BrownianTable: expected " + std::to_string(n_paths * grid.N * grid.M) +
                                    " fine draws, got " + std::to_string(fine_normals.size()));
    }
    return BrownianTable(grid, seed, n_paths, std::move(fine_normals));
}

void BrownianTable::check_path(std::size_t path) const {
    if (path >= n_paths_) {
        throw std::out_of_range("BrownianTable: path " + std::to_string(path) + " out of range (" +
                                std::to_string(n_paths_) + " paths)");
    }
}

std::span<const double> BrownianTable::fine_normals(std::size_t path, std::size_t n) const {
    check_path(path);
    if (n >= grid_.N) throw std::out_of_range("BrownianTable: interval index out of range");
    return std::span<const double>(fine_).subspan((path * grid_.N + n) * grid_.M, grid_.M);
}

double BrownianTable::coarse_normal(std::size_t path, std::size_t n) const {
    check_path(path);
    if (n >= grid_.N) throw std::out_of_range("BrownianTable: interval index out of range");
    return coarse_[path * grid_.N + n];
}

std::vector<double> BrownianTable::wiener_path(std::size_t path) const {
    check_path(path);
    const double sqrt_dt = std::sqrt(grid_.dt);
    std::vector<double> w(grid_.fine_steps() + 1, 0.0);
    const double* row = fine_.data() + path * grid_.fine_steps();
    for (std::size_t i = 0; i < grid_.fine_steps(); ++i) w[i + 1] = w[i] + sqrt_dt * row[i];
    return w;
}

BrownianTable BrownianTable::coarsened(std::size_t factor) const {
    if (factor == 0 || grid_.M % factor != 0) {
        throw std::invalid_argument("BrownianTable::coarsened: factor must divide M");
    }
    const TimeGrid grid = build_grid(grid_.T, grid_.N, grid_.M / factor);
    const double scale = 1.0 / std::sqrt(static_cast<double>(factor));
    std::vector<double> fine(fine_.size() / factor);
    for (std::size_t i = 0; i < fine.size(); ++i) {
        double sum = 0.0;
        for (std::size_t l = 0; l < factor; ++l) sum += fine_[i * factor + l];
        fine[i] = scale * sum;
    }
    return BrownianTable(grid, seed_, n_paths_, std::move(fine));
}

BrownianTable generate_brownian_table(const TimeGrid& grid, std::uint64_t seed, std::size_t n_paths,
                                      const Execution& exec) {
    return BrownianTable::generate(grid, seed, n_paths, exec);
}

std::vector<CoarseIncrement> coarse_increments(const BrownianTable& table, std::size_t path) {
    if (path >= table.n_paths()) throw std::out_of_range("coarse_increments: path out of range");
    const double sqrt_dT = std::sqrt(table.grid().dT);
    std::vector<CoarseIncrement> out(table.grid().N);
    for (std::size_t n = 0; n < out.size(); ++n) {
        const double v = table.coarse_normal(path, n);
        out[n] = {v, sqrt_dT * v};
    }
    return out;
}

namespace {

constexpr std::array<char, 4> kMagic{'B', 'W', 'T', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> bytes{};
    for (std::size_t i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
        throw std::runtime_error("read_table: truncated input");
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return v;
}

}  // namespace

void write_table(const BrownianTable& table, std::ostream& out) {
    const TimeGrid& g = table.grid();
    out.write(kMagic.data(), kMagic.size());
    put_u64(out, std::bit_cast<std::uint64_t>(g.T));
    put_u64(out, g.N);
    put_u64(out, g.M);
    put_u64(out, table.n_paths());
    put_u64(out, table.seed());
    for (double v : table.raw_fine_normals()) put_u64(out, std::bit_cast<std::uint64_t>(v));
    if (!out) throw std::runtime_error("write_table: write failed");
}

BrownianTable read_table(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw std::runtime_error("read_table: missing BWT1 header");
    }
    const double T = std::bit_cast<double>(get_u64(in));
    const std::uint64_t N = get_u64(in);
    const std::uint64_t M = get_u64(in);
    const std::uint64_t n_paths = get_u64(in);
    const std::uint64_t seed = get_u64(in);
    const TimeGrid grid = build_grid(T, N, M);
    if (n_paths == 0) throw std::runtime_error("read_table: zero paths");
    std::vector<double> fine(n_paths * N * M);
    for (double& v : fine) v = std::bit_cast<double>(get_u64(in));
    return BrownianTable::from_fine_normals(grid, seed, n_paths, std::move(fine));
}

void save_table(const BrownianTable& table, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("save_table: cannot open " + file.string());
    write_table(table, out);
}

BrownianTable load_table(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("load_table: cannot open " + file.string());
    return read_table(in);
}

}  // namespace sparareal

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "sparareal/parallel.hpp"

namespace sparareal {

/// Two-level uniform time discretization of [0, T]: N coarse intervals of
/// width dT, each split into M fine steps of width dt = dT / M.
struct TimeGrid {
    double T = 1.0;
    std::size_t N = 1;
    std::size_t M = 1;
    double dT = 1.0;
    double dt = 1.0;

    double coarse_time(std::size_t n) const noexcept { return static_cast<double>(n) * dT; }
    double fine_time(std::size_t n, std::size_t j) const noexcept {
        return coarse_time(n) + static_cast<double>(j) * dt;
    }
    std::size_t fine_steps() const noexcept { return N * M; }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Throws std::invalid_argument unless T > 0 (finite), N >= 1 and M >= 1.
TimeGrid build_grid(double T, std::size_t N, std::size_t M);

/// Coarse standard normal V_n and the Wiener increment sqrt(dT) * V_n.
struct CoarseIncrement {
    double normal = 0.0;
    double dW = 0.0;
};

/// Immutable table of per-path fine standard-normal draws. Coarse normals
/// are derived from the fine draws, V_n = M^{-1/2} * sum_j v_{n,j}, so the
/// coarse and fine Wiener increments of a path always agree.
class BrownianTable {
public:
    /// Draws are keyed by (seed, path, n, j); generation order and thread
    /// count do not affect the result.
    static BrownianTable generate(const TimeGrid& grid, std::uint64_t seed, std::size_t n_paths,
                                  const Execution& exec = {});

    /// Wraps explicit fine draws laid out as [path][n][j].
    static BrownianTable from_fine_normals(const TimeGrid& grid, std::uint64_t seed, std::size_t n_paths,
                                           std::vector<double> fine_normals);

    const TimeGrid& grid() const noexcept { return grid_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t n_paths() const noexcept { return n_paths_; }

    /// The M fine draws of coarse interval n on a path.
    std::span<const double> fine_normals(std::size_t path, std::size_t n) const;
    double fine_normal(std::size_t path, std::size_t n, std::size_t j) const { return fine_normals(path, n)[j]; }
    double coarse_normal(std::size_t path, std::size_t n) const;

    /// All fine draws, row-major [path][n][j].
    std::span<const double> raw_fine_normals() const noexcept { return fine_; }

    /// W at every fine node t = i * dt, i = 0..N*M, starting from W(0) = 0.
    std::vector<double> wiener_path(std::size_t path) const;

    /// Same paths on a grid with M / factor fine steps per interval. Adjacent
    /// fine draws are merged as (v_0 + ... + v_{f-1}) / sqrt(f).
    BrownianTable coarsened(std::size_t factor) const;

    friend bool operator==(const BrownianTable&, const BrownianTable&) = default;

private:
    BrownianTable(const TimeGrid& grid, std::uint64_t seed, std::size_t n_paths, std::vector<double> fine);
    void check_path(std::size_t path) const;

    TimeGrid grid_;
    std::uint64_t seed_ = 0;
    std::size_t n_paths_ = 0;
    std::vector<double> fine_;
    std::vector<double> coarse_;
};

BrownianTable generate_brownian_table(const TimeGrid& grid, std::uint64_t seed, std::size_t n_paths,
                                      const Execution& exec = {});

/// Coarse normals and Wiener increments of one path. Throws std::out_of_range
/// for an invalid path.
std::vector<CoarseIncrement> coarse_increments(const BrownianTable& table, std::size_t path);

// Binary table format: "BWT1", then T (f64), N, M, n_paths, seed (u64), all
// little-endian, followed by the fine draws as little-endian f64 [path][n][j].
void write_table(const BrownianTable& table, std::ostream& out);
BrownianTable read_table(std::istream& in);
void save_table(const BrownianTable& table, const std::filesystem::path& file);
BrownianTable load_table(const std::filesystem::path& file);

}  // namespace sparareal

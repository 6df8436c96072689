#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>

#include "vpmap/graph.hpp"

namespace vpmap::testutil {

inline AdjacencyGraph path_graph(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return make_graph(n, std::move(edges));
}

// Random connected graph: a random attachment tree plus a few extra edges.
inline AdjacencyGraph random_connected_graph(int n, unsigned seed,
                                             int extra_edges = 3) {
    std::mt19937 gen(seed);
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> pick(0, v - 1);
        edges.emplace_back(pick(gen), v);
    }
    std::uniform_int_distribution<int> any(0, n - 1);
    for (int k = 0; k < extra_edges; ++k) {
        const int a = any(gen), b = any(gen);
        if (a != b) edges.emplace_back(a, b);
    }
    return make_graph(n, std::move(edges));
}

// Adaptive Simpson quadrature; the independent integration oracle used by
// the prior normalization tests.
inline double simpson(const std::function<double(double)>& f, double a,
                      double b) {
    const double c = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol, int depth = 28) {
    const double c = 0.5 * (a + b);
    const double whole = simpson(f, a, b);
    const double left = simpson(f, a, c);
    const double right = simpson(f, c, b);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, c, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, c, b, 0.5 * tol, depth - 1);
}

// Scratch directory under the system temp path, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("vpmap_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const {
        return (path_ / name).string();
    }
    void write(const std::string& name, const std::string& content) const {
        std::ofstream out(path_ / name);
        out << content;
    }

  private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace vpmap::testutil

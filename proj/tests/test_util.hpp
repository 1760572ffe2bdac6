#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "datamin/dataset.hpp"
#include "datamin/rng.hpp"

namespace testutil {

inline datamin::Dataset make_dataset(std::vector<datamin::FeatureColumn> columns,
                                     std::vector<std::string> task,
                                     std::vector<std::string> user) {
    datamin::Dataset ds;
    ds.features = std::move(columns);
    ds.task_labels = datamin::make_labeling(task);
    ds.user_labels = datamin::make_labeling(user);
    datamin::validate(ds);
    return ds;
}

// Two features, binary task labels determined by f0's sign, user labels
// drawn independently of everything.
inline datamin::Dataset separable_dataset(std::size_t n, std::uint64_t seed,
                                          std::size_t n_users = 4) {
    datamin::Rng rng(seed);
    std::vector<double> f0(n);
    std::vector<double> f1(n);
    std::vector<std::string> task(n);
    std::vector<std::string> user(n);
    for (std::size_t i = 0; i < n; ++i) {
        f0[i] = rng.uniform(-1.0, 1.0);
        f1[i] = rng.uniform(-1.0, 1.0);
        task[i] = f0[i] < 0.0 ? "A" : "B";
        user[i] = "u" + std::to_string(rng.next_below(n_users));
    }
    return make_dataset({{"f0", std::move(f0)}, {"f1", std::move(f1)}},
                        std::move(task), std::move(user));
}

class TempDir {
public:
    TempDir() {
        path_ = std::filesystem::temp_directory_path() /
                ("datamin_test_" + std::to_string(counter()++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const {
        return (path_ / name).string();
    }

private:
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

}  // namespace testutil

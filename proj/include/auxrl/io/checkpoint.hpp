#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "auxrl/transition.hpp"

namespace auxrl::io {

// Self-describing container shared by representation and agent checkpoints.
//
// Layout (little-endian):
//   8 bytes   magic "AUXRLCK1"
//   8 bytes   u64 length of the JSON header
//   N bytes   JSON header: {"meta": ..., "arrays": [{"name", "rows", "cols"}, ...]}
//   payload   float32 column-major data of every array, in header order
//
// Arrays are written as raw bits, so a save/load round trip is exact.
class Checkpoint {
public:
    nlohmann::json meta = nlohmann::json::object();

    void add(std::string name, const Mat& value);
    const Mat& get(const std::string& name) const;
    bool contains(const std::string& name) const;
    const std::vector<std::pair<std::string, Mat>>& arrays() const { return arrays_; }

    void save(const std::filesystem::path& path) const;
    static Checkpoint load(const std::filesystem::path& path);

private:
    std::vector<std::pair<std::string, Mat>> arrays_;
};

}  // namespace auxrl::io

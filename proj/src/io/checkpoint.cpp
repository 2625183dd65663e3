#include "auxrl/io/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "auxrl/errors.hpp"

namespace auxrl::io {

namespace {

constexpr std::array<char, 8> kMagic = {'A', 'U', 'X', 'R', 'L', 'C', 'K', '1'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

}  // namespace

void Checkpoint::add(std::string name, const Mat& value) {
    if (contains(name)) throw InputError("checkpoint: duplicate array '" + name + "'");
    arrays_.emplace_back(std::move(name), value);
}

bool Checkpoint::contains(const std::string& name) const {
    for (const auto& [n, _] : arrays_)
        if (n == name) return true;
    return false;
}

const Mat& Checkpoint::get(const std::string& name) const {
    for (const auto& [n, m] : arrays_)
        if (n == name) return m;
    throw InputError("checkpoint: missing array '" + name + "'");
}

void Checkpoint::save(const std::filesystem::path& path) const {
    nlohmann::json header;
    header["meta"] = meta;
    header["arrays"] = nlohmann::json::array();
    for (const auto& [name, m] : arrays_) header["arrays"].push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
    const std::string text = header.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot open '" + path.string() + "' for writing");
    out.write(kMagic.data(), kMagic.size());
    const std::uint64_t len = text.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& [_, m] : arrays_)
        out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(float)));
    if (!out) throw std::runtime_error("checkpoint: write failed for '" + path.string() + "'");
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("checkpoint: cannot open '" + path.string() + "'");
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw InputError("checkpoint: '" + path.string() + "' is not a checkpoint file");
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string text(len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(len));
    if (!in) throw InputError("checkpoint: truncated header in '" + path.string() + "'");

    const auto header = nlohmann::json::parse(text);
    Checkpoint ck;
    ck.meta = header.at("meta");
    for (const auto& a : header.at("arrays")) {
        Mat m(a.at("rows").get<Eigen::Index>(), a.at("cols").get<Eigen::Index>());
        in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(float)));
        if (!in) throw InputError("checkpoint: truncated payload in '" + path.string() + "'");
        ck.arrays_.emplace_back(a.at("name").get<std::string>(), std::move(m));
    }
    return ck;
}

}  // namespace auxrl::io

#include "agecharge/nn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "agecharge/common/errors.hpp"

namespace agecharge::nn {

namespace {
constexpr char kMagic[8] = {'A', 'G', 'C', 'K', 'P', 'T', '0', '1'};

std::string shape_str(const std::vector<int>& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out + "]";
}
}  // namespace

void Checkpoint::add(std::string name, std::vector<int> shape, std::vector<double> data) {
    tensors.push_back({std::move(name), std::move(shape), std::move(data)});
}

bool Checkpoint::has(const std::string& name) const {
    for (const auto& t : tensors) {
        if (t.name == name) return true;
    }
    return false;
}

const Tensor& Checkpoint::get(const std::string& name) const {
    for (const auto& t : tensors) {
        if (t.name == name) return t;
    }
    throw std::out_of_range("checkpoint has no tensor '" + name + "'");
}

void Checkpoint::add_net(const std::string& prefix, const MlpNet& net) {
    add(prefix + ".params", net.sizes(), net.params());
}

void Checkpoint::load_net(const std::string& prefix, MlpNet& net) const {
    const auto& t = get(prefix + ".params");
    if (t.shape != net.sizes() || t.data.size() != net.n_params()) {
        throw ShapeError("checkpoint net '" + prefix + "' has layers " + shape_str(t.shape) + ", expected " +
                         shape_str(net.sizes()));
    }
    net.params() = t.data;
}

void Checkpoint::add_adam(const std::string& prefix, const Adam& opt) {
    add(prefix + ".m", {static_cast<int>(opt.m().size())}, opt.m());
    add(prefix + ".v", {static_cast<int>(opt.v().size())}, opt.v());
    meta[prefix + ".steps"] = opt.steps();
}

void Checkpoint::load_adam(const std::string& prefix, Adam& opt) const {
    const auto& m = get(prefix + ".m");
    const auto& v = get(prefix + ".v");
    if (m.data.size() != opt.m().size() || v.data.size() != opt.v().size()) {
        throw ShapeError("checkpoint optimizer '" + prefix + "' has " + std::to_string(m.data.size()) +
                         " moments, expected " + std::to_string(opt.m().size()));
    }
    opt.m() = m.data;
    opt.v() = v.data;
    opt.set_steps(meta.value(prefix + ".steps", 0LL));
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
    nlohmann::json header;
    header["meta"] = c.meta;
    header["tensors"] = nlohmann::json::array();
    for (const auto& t : c.tensors) {
        header["tensors"].push_back({{"name", t.name}, {"shape", t.shape}, {"count", t.data.size()}});
    }
    const std::string h = header.dump();
    const std::uint64_t len = h.size();

    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write checkpoint " + tmp.string());
        out.write(kMagic, sizeof kMagic);
        out.write(reinterpret_cast<const char*>(&len), sizeof len);
        out.write(h.data(), static_cast<std::streamsize>(h.size()));
        for (const auto& t : c.tensors) {
            out.write(reinterpret_cast<const char*>(t.data.data()),
                      static_cast<std::streamsize>(t.data.size() * sizeof(double)));
        }
        if (!out) throw std::runtime_error("short write on checkpoint " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
    char magic[8];
    std::uint64_t len = 0;
    in.read(magic, sizeof magic);
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
        throw std::runtime_error(path.string() + " is not a checkpoint file");
    }
    std::string h(len, '\0');
    in.read(h.data(), static_cast<std::streamsize>(len));
    Checkpoint c;
    const auto header = nlohmann::json::parse(h);
    c.meta = header.at("meta");
    for (const auto& t : header.at("tensors")) {
        Tensor x;
        x.name = t.at("name").get<std::string>();
        x.shape = t.at("shape").get<std::vector<int>>();
        x.data.resize(t.at("count").get<std::size_t>());
        in.read(reinterpret_cast<char*>(x.data.data()), static_cast<std::streamsize>(x.data.size() * sizeof(double)));
        c.tensors.push_back(std::move(x));
    }
    if (!in) throw std::runtime_error("checkpoint " + path.string() + " is truncated");
    return c;
}

}  // namespace agecharge::nn

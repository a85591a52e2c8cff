#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "agecharge/nn/adam.hpp"
#include "agecharge/nn/mlp.hpp"

namespace agecharge::nn {

struct Tensor {
    std::string name;
    std::vector<int> shape;
    std::vector<double> data;
};

/// Binary container: 8-byte magic, u64 header length, JSON header (meta plus tensor names,
/// shapes and element counts), then every tensor's doubles in header order.
struct Checkpoint {
    nlohmann::json meta = nlohmann::json::object();
    std::vector<Tensor> tensors;

    void add(std::string name, std::vector<int> shape, std::vector<double> data);
    /// Throws std::out_of_range if absent.
    const Tensor& get(const std::string& name) const;
    bool has(const std::string& name) const;

    /// Stores params under "<prefix>.params" with the layer sizes as shape.
    void add_net(const std::string& prefix, const MlpNet& net);
    /// Throws ShapeError when the stored layer sizes differ from the net's.
    void load_net(const std::string& prefix, MlpNet& net) const;
    void add_adam(const std::string& prefix, const Adam& opt);
    void load_adam(const std::string& prefix, Adam& opt) const;
};

/// Written to a temporary sibling and renamed into place.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace agecharge::nn

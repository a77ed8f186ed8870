#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace perceptlab {

// Dense row-major matrix of doubles. All model math happens in 64-bit;
// checkpoints quantize to float32 on disk.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}
    double* row(int r) { return v.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return v.data() + static_cast<std::size_t>(r) * cols; }
    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
};

struct Tensor {
    std::vector<int> shape;
    std::vector<double> v;

    std::size_t numel() const { return v.size(); }
};

Tensor make_tensor(const std::vector<int>& shape);

enum class Component : int { encoder = 0, projector = 1, lm = 2 };

const std::string& component_name(Component c);
Component component_from_name(const std::string& name);

struct NamedTensor {
    std::string name;
    Component component;
    Tensor tensor;
};

// Ordered named-tensor store; order defines the checkpoint payload layout.
class Parameters {
public:
    Tensor& add(const std::string& name, Component comp, const std::vector<int>& shape);

    bool has(const std::string& name) const { return index_.count(name) != 0; }
    Tensor& at(const std::string& name);
    const Tensor& at(const std::string& name) const;
    Component component_of(const std::string& name) const;

    std::vector<NamedTensor>& tensors() { return tensors_; }
    const std::vector<NamedTensor>& tensors() const { return tensors_; }
    std::size_t total_values() const;

private:
    std::vector<NamedTensor> tensors_;
    std::unordered_map<std::string, int> index_;
};

// Gradients keyed by tensor name; only tensors active under the mask get
// an entry.
using Gradients = std::unordered_map<std::string, Tensor>;

// Which components receive gradients. "partial" activates the last LM
// block plus the head.
struct ComponentMask {
    enum class LmMode : int { none = 0, full = 1, partial = 2 };
    bool encoder = false;
    bool projector = false;
    LmMode lm = LmMode::none;

    bool any() const { return encoder || projector || lm != LmMode::none; }
    bool operator==(const ComponentMask&) const = default;
};

ComponentMask full_mask();
// Grammar: comma-separated subset of {encoder, projector, lm, lm-partial};
// lm and lm-partial are mutually exclusive.
ComponentMask parse_mask(const std::string& text);
std::string mask_to_string(const ComponentMask& mask);

// True when the named tensor is trainable under the mask. lm_layers is
// needed to identify the last LM block.
bool tensor_in_mask(const ComponentMask& mask, const std::string& name, Component comp,
                    int lm_layers);

}  // namespace perceptlab

#include "perceptlab/tensor.hpp"

#include <array>
#include <sstream>

#include "perceptlab/errors.hpp"

namespace perceptlab {

Tensor make_tensor(const std::vector<int>& shape) {
    Tensor t;
    t.shape = shape;
    std::size_t n = 1;
    for (int d : shape) {
        if (d <= 0) throw ConfigError("tensor dimensions must be positive");
        n *= static_cast<std::size_t>(d);
    }
    t.v.assign(n, 0.0);
    return t;
}

namespace {
const std::array<std::string, 3> kComponentNames = {"encoder", "projector", "lm"};
}

const std::string& component_name(Component c) {
    return kComponentNames[static_cast<int>(c)];
}

Component component_from_name(const std::string& name) {
    for (int i = 0; i < 3; ++i)
        if (kComponentNames[i] == name) return static_cast<Component>(i);
    throw DataError("unknown component '" + name + "'");
}

Tensor& Parameters::add(const std::string& name, Component comp, const std::vector<int>& shape) {
    if (has(name)) throw ConfigError("duplicate tensor name '" + name + "'");
    index_[name] = static_cast<int>(tensors_.size());
    tensors_.push_back(NamedTensor{name, comp, make_tensor(shape)});
    return tensors_.back().tensor;
}

Tensor& Parameters::at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw DataError("unknown tensor '" + name + "'");
    return tensors_[static_cast<std::size_t>(it->second)].tensor;
}

const Tensor& Parameters::at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw DataError("unknown tensor '" + name + "'");
    return tensors_[static_cast<std::size_t>(it->second)].tensor;
}

Component Parameters::component_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw DataError("unknown tensor '" + name + "'");
    return tensors_[static_cast<std::size_t>(it->second)].component;
}

std::size_t Parameters::total_values() const {
    std::size_t n = 0;
    for (const auto& nt : tensors_) n += nt.tensor.numel();
    return n;
}

ComponentMask full_mask() {
    ComponentMask m;
    m.encoder = m.projector = true;
    m.lm = ComponentMask::LmMode::full;
    return m;
}

ComponentMask parse_mask(const std::string& text) {
    ComponentMask m;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        // trim
        std::size_t a = part.find_first_not_of(" \t");
        std::size_t b = part.find_last_not_of(" \t");
        if (a == std::string::npos) continue;
        part = part.substr(a, b - a + 1);
        if (part == "encoder") {
            m.encoder = true;
        } else if (part == "projector") {
            m.projector = true;
        } else if (part == "lm") {
            if (m.lm == ComponentMask::LmMode::partial)
                throw ConfigError("activation mask: lm and lm-partial are mutually exclusive");
            m.lm = ComponentMask::LmMode::full;
        } else if (part == "lm-partial") {
            if (m.lm == ComponentMask::LmMode::full)
                throw ConfigError("activation mask: lm and lm-partial are mutually exclusive");
            m.lm = ComponentMask::LmMode::partial;
        } else {
            throw ConfigError("activation mask: unknown component '" + part +
                              "' (expected encoder, projector, lm, lm-partial)");
        }
    }
    if (!m.any()) throw ConfigError("activation mask must name at least one component");
    return m;
}

std::string mask_to_string(const ComponentMask& mask) {
    std::string out;
    auto append = [&](const std::string& s) {
        if (!out.empty()) out += ",";
        out += s;
    };
    if (mask.encoder) append("encoder");
    if (mask.projector) append("projector");
    if (mask.lm == ComponentMask::LmMode::full) append("lm");
    if (mask.lm == ComponentMask::LmMode::partial) append("lm-partial");
    if (out.empty()) out = "none";
    return out;
}

bool tensor_in_mask(const ComponentMask& mask, const std::string& name, Component comp,
                    int lm_layers) {
    switch (comp) {
        case Component::encoder:
            return mask.encoder;
        case Component::projector:
            return mask.projector;
        case Component::lm:
            if (mask.lm == ComponentMask::LmMode::full) return true;
            if (mask.lm == ComponentMask::LmMode::partial) {
                std::string last_block = "lm.blk" + std::to_string(lm_layers - 1) + ".";
                return name.rfind(last_block, 0) == 0 || name == "lm.head";
            }
            return false;
    }
    return false;
}

}  // namespace perceptlab

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perceptlab/distortion.hpp"
#include "perceptlab/image.hpp"
#include "perceptlab/tensor.hpp"
#include "perceptlab/text.hpp"

namespace perceptlab {

// Weight initialization recipes. "plain" draws every weight from N(0, 0.02^2).
// "structured" is the default: it additionally ties the head to the embedding
// table at init, gives the LM value/output projections an identity component,
// and uses a well-conditioned projector (orthogonal map, near-identity
// pooling). The structured recipe is the desk-scale stand-in for the
// embedding-coherent circuits a pretrained language model would contribute;
// without it, encoder-only fine-tuning cannot move visual features toward
// label embeddings through the frozen random LM.
enum class InitScheme : int { structured = 0, plain = 1 };

const std::string& init_scheme_name(InitScheme s);
InitScheme init_scheme_from_name(const std::string& name);

struct ModelConfig {
    int image_size = 64;
    int patch_size = 16;
    int encoder_dim = 64;
    int lm_dim = 64;
    int encoder_layers = 2;
    int lm_layers = 2;
    int heads = 4;
    int n_visual_tokens = 16;
    int max_seq_len = 96;
    std::uint64_t init_seed = 1;
    InitScheme init_scheme = InitScheme::structured;

    int n_patches() const {
        int side = image_size / patch_size;
        return side * side;
    }
    bool operator==(const ModelConfig&) const = default;
};

void validate_config(const ModelConfig& cfg);

// Fresh parameter set; deterministic in cfg.init_seed. Tensor order is the
// checkpoint payload order.
Parameters init_parameters(const ModelConfig& cfg);

// ---- forward caches (retained for backprop) ------------------------------

struct BlockCache {
    Mat x_in;                              // residual input [S x D]
    Mat ln1_out;                           // [S x D]
    std::vector<double> ln1_mean, ln1_rstd;
    Mat q, k, vv;                          // packed heads [S x D]
    std::vector<Mat> att;                  // per head, softmax probs [S x S]
    Mat ctx;                               // attention mix [S x D]
    Mat x_mid;                             // x_in + attn projection
    Mat ln2_out;
    std::vector<double> ln2_mean, ln2_rstd;
    Mat mlp_pre;                           // pre-GELU [S x 4D]
    Mat mlp_act;                           // GELU output [S x 4D]
    Mat x_out;                             // x_mid + mlp projection
};

struct StackCache {
    std::vector<BlockCache> blocks;
    Mat lnf_in;
    std::vector<double> lnf_mean, lnf_rstd;
    Mat lnf_out;
};

struct EncoderCache {
    Mat patches;  // [P x 3*ps*ps], pixel values mapped to [-1, 1]
    StackCache stack;
};

struct LmCache {
    int n_vis = 0;
    std::vector<int> input_ids;
    StackCache stack;
};

// ---- operations -----------------------------------------------------------

// Pixels -> patch feature matrix [n_patches x encoder_dim].
Mat encode_image(const Parameters& p, const ModelConfig& cfg, const RgbImage& img,
                 EncoderCache* cache = nullptr);

// Patch features -> visual tokens [n_visual_tokens x lm_dim].
Mat project(const Parameters& p, const ModelConfig& cfg, const Mat& patch_features);

// Causal LM over [visual tokens ; embedded text]. Returns logits for every
// text position (row t predicts the token after input_ids[t]).
Mat forward(const Parameters& p, const ModelConfig& cfg, const Mat& visual_tokens,
            const std::vector<int>& input_ids, LmCache* cache = nullptr);

// Same forward, but materializes logits only at positions with mask set.
// Rows of the result align with input positions; unmasked rows are zero.
Mat forward_masked_logits(const Parameters& p, const ModelConfig& cfg, const Mat& visual_tokens,
                          const std::vector<int>& input_ids,
                          const std::vector<std::uint8_t>& logit_mask, LmCache* cache);

// Greedy decoding; stops at <eos> or max_new_tokens. The prompt must
// contain the "<image>" placeholder.
std::string generate(const Parameters& p, const ModelConfig& cfg, const RgbImage& img,
                     const std::string& prompt, int max_new_tokens);

// Mean over the projected visual tokens (the probe quantity V).
std::vector<double> pooled_visual_embedding(const Parameters& p, const ModelConfig& cfg,
                                            const RgbImage& img);

// Token-embedding-table row of the class word (the probe quantity L).
std::vector<double> label_embedding(const Parameters& p, DistortionClass cls);

// Next-token distribution given [visual ; <bos> prompt ; "the image has some"].
// Returns the full softmax row; raw_logits optionally receives the
// pre-softmax scores.
std::vector<double> degradation_slot_distribution(const Parameters& p, const ModelConfig& cfg,
                                                  const RgbImage& img,
                                                  std::vector<double>* raw_logits = nullptr);

}  // namespace perceptlab

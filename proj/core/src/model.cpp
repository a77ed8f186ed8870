#include "perceptlab/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "perceptlab/errors.hpp"
#include "perceptlab/rng.hpp"

namespace perceptlab {

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kInitStd = 0.02;
constexpr double kOvIdentity = 0.4;  // identity component of LM value/output maps

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

void ln_forward(const Mat& x, const Tensor& g, const Tensor& b, Mat& out,
                std::vector<double>& mean, std::vector<double>& rstd) {
    const int n = x.cols;
    out = Mat(x.rows, n);
    mean.assign(x.rows, 0.0);
    rstd.assign(x.rows, 0.0);
    for (int r = 0; r < x.rows; ++r) {
        const double* xi = x.row(r);
        double m = 0.0;
        for (int i = 0; i < n; ++i) m += xi[i];
        m /= n;
        double var = 0.0;
        for (int i = 0; i < n; ++i) var += (xi[i] - m) * (xi[i] - m);
        var /= n;
        double rs = 1.0 / std::sqrt(var + kLnEps);
        mean[r] = m;
        rstd[r] = rs;
        double* oi = out.row(r);
        for (int i = 0; i < n; ++i) oi[i] = g.v[i] * (xi[i] - m) * rs + b.v[i];
    }
}

// y = x * W^T + b with W stored [out x in].
void linear_forward(const Mat& x, const Tensor& w, const Tensor& b, Mat& y) {
    const int in = x.cols;
    const int out = w.shape[0];
    y = Mat(x.rows, out);
    for (int r = 0; r < x.rows; ++r) {
        const double* xi = x.row(r);
        double* yi = y.row(r);
        for (int o = 0; o < out; ++o) {
            const double* wo = w.v.data() + static_cast<std::size_t>(o) * in;
            double acc = b.v[o];
            for (int k = 0; k < in; ++k) acc += xi[k] * wo[k];
            yi[o] = acc;
        }
    }
}

void block_forward(const Parameters& p, const std::string& bp, int heads, bool causal, Mat x,
                   BlockCache& bc) {
    const int S = x.rows;
    const int D = x.cols;
    const int dh = D / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    bc.x_in = std::move(x);
    ln_forward(bc.x_in, p.at(bp + "ln1.g"), p.at(bp + "ln1.b"), bc.ln1_out, bc.ln1_mean,
               bc.ln1_rstd);
    linear_forward(bc.ln1_out, p.at(bp + "attn.wq"), p.at(bp + "attn.bq"), bc.q);
    linear_forward(bc.ln1_out, p.at(bp + "attn.wk"), p.at(bp + "attn.bk"), bc.k);
    linear_forward(bc.ln1_out, p.at(bp + "attn.wv"), p.at(bp + "attn.bv"), bc.vv);

    bc.att.assign(static_cast<std::size_t>(heads), Mat());
    bc.ctx = Mat(S, D);
    std::vector<double> scores(static_cast<std::size_t>(S));
    for (int h = 0; h < heads; ++h) {
        Mat& att = bc.att[static_cast<std::size_t>(h)];
        att = Mat(S, S);
        const int off = h * dh;
        for (int i = 0; i < S; ++i) {
            const int jmax = causal ? i : S - 1;
            const double* qi = bc.q.row(i) + off;
            double mx = -1e300;
            for (int j = 0; j <= jmax; ++j) {
                const double* kj = bc.k.row(j) + off;
                double s = 0.0;
                for (int d = 0; d < dh; ++d) s += qi[d] * kj[d];
                s *= scale;
                scores[static_cast<std::size_t>(j)] = s;
                if (s > mx) mx = s;
            }
            double Z = 0.0;
            for (int j = 0; j <= jmax; ++j) {
                double e = std::exp(scores[static_cast<std::size_t>(j)] - mx);
                att.at(i, j) = e;
                Z += e;
            }
            double* ai = att.row(i);
            for (int j = 0; j <= jmax; ++j) ai[j] /= Z;
            double* ci = bc.ctx.row(i) + off;
            for (int d = 0; d < dh; ++d) ci[d] = 0.0;
            for (int j = 0; j <= jmax; ++j) {
                const double a = ai[j];
                if (a == 0.0) continue;
                const double* vj = bc.vv.row(j) + off;
                for (int d = 0; d < dh; ++d) ci[d] += a * vj[d];
            }
        }
    }

    Mat attn_out;
    linear_forward(bc.ctx, p.at(bp + "attn.wo"), p.at(bp + "attn.bo"), attn_out);
    bc.x_mid = Mat(S, D);
    for (std::size_t i = 0; i < bc.x_mid.v.size(); ++i)
        bc.x_mid.v[i] = bc.x_in.v[i] + attn_out.v[i];

    ln_forward(bc.x_mid, p.at(bp + "ln2.g"), p.at(bp + "ln2.b"), bc.ln2_out, bc.ln2_mean,
               bc.ln2_rstd);
    linear_forward(bc.ln2_out, p.at(bp + "mlp.w1"), p.at(bp + "mlp.b1"), bc.mlp_pre);
    bc.mlp_act = Mat(bc.mlp_pre.rows, bc.mlp_pre.cols);
    for (std::size_t i = 0; i < bc.mlp_pre.v.size(); ++i) bc.mlp_act.v[i] = gelu(bc.mlp_pre.v[i]);
    Mat mlp_out;
    linear_forward(bc.mlp_act, p.at(bp + "mlp.w2"), p.at(bp + "mlp.b2"), mlp_out);
    bc.x_out = Mat(S, D);
    for (std::size_t i = 0; i < bc.x_out.v.size(); ++i)
        bc.x_out.v[i] = bc.x_mid.v[i] + mlp_out.v[i];
}

void run_stack(const Parameters& p, const std::string& prefix, int layers, int heads, bool causal,
               Mat x, StackCache& sc) {
    sc.blocks.assign(static_cast<std::size_t>(layers), BlockCache{});
    for (int l = 0; l < layers; ++l) {
        std::string bp = prefix + ".blk" + std::to_string(l) + ".";
        block_forward(p, bp, heads, causal, std::move(x), sc.blocks[static_cast<std::size_t>(l)]);
        x = sc.blocks[static_cast<std::size_t>(l)].x_out;
    }
    sc.lnf_in = std::move(x);
    ln_forward(sc.lnf_in, p.at(prefix + ".lnf.g"), p.at(prefix + ".lnf.b"), sc.lnf_out,
               sc.lnf_mean, sc.lnf_rstd);
}

// Orthonormalizes the smaller side of a gaussian matrix in place
// (modified Gram-Schmidt).
void orthogonalize(Tensor& t) {
    const int rows = t.shape[0];
    const int cols = t.shape[1];
    const bool by_rows = rows <= cols;
    const int n = by_rows ? rows : cols;
    const int len = by_rows ? cols : rows;
    auto get = [&](int i, int k) -> double& {
        return by_rows ? t.v[static_cast<std::size_t>(i) * cols + k]
                       : t.v[static_cast<std::size_t>(k) * cols + i];
    };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            double dot = 0.0;
            for (int k = 0; k < len; ++k) dot += get(i, k) * get(j, k);
            for (int k = 0; k < len; ++k) get(i, k) -= dot * get(j, k);
        }
        double norm = 0.0;
        for (int k = 0; k < len; ++k) norm += get(i, k) * get(i, k);
        norm = std::sqrt(std::max(norm, 1e-30));
        for (int k = 0; k < len; ++k) get(i, k) /= norm;
    }
}

}  // namespace

const std::string& init_scheme_name(InitScheme s) {
    static const std::array<std::string, 2> names = {"structured", "plain"};
    return names[static_cast<int>(s)];
}

InitScheme init_scheme_from_name(const std::string& name) {
    if (name == "structured") return InitScheme::structured;
    if (name == "plain") return InitScheme::plain;
    throw ConfigError("unknown init scheme '" + name + "' (expected structured or plain)");
}

void validate_config(const ModelConfig& cfg) {
    if (cfg.image_size < 16 || cfg.image_size % 8 != 0)
        throw ConfigError("model.image_size must be >= 16 and divisible by 8");
    if (cfg.patch_size <= 0 || cfg.image_size % cfg.patch_size != 0)
        throw ConfigError("model.image_size must be divisible by model.patch_size");
    if (cfg.encoder_dim <= 0 || cfg.lm_dim <= 0)
        throw ConfigError("model dims must be positive");
    if (cfg.heads <= 0 || cfg.encoder_dim % cfg.heads != 0 || cfg.lm_dim % cfg.heads != 0)
        throw ConfigError("model.heads must divide encoder_dim and lm_dim");
    if (cfg.encoder_layers < 1 || cfg.lm_layers < 1)
        throw ConfigError("model layer counts must be >= 1");
    if (cfg.n_visual_tokens < 1 || cfg.n_patches() < cfg.n_visual_tokens)
        throw ConfigError("model.n_visual_tokens must be in 1..n_patches");
    if (cfg.max_seq_len < cfg.n_visual_tokens + 8)
        throw ConfigError("model.max_seq_len too small");
}

Parameters init_parameters(const ModelConfig& cfg) {
    validate_config(cfg);
    const Vocabulary& vocab = Vocabulary::standard();
    const int E = cfg.encoder_dim, D = cfg.lm_dim, P = cfg.n_patches();
    const int V = cfg.n_visual_tokens, C = vocab.size();
    const int pin = 3 * cfg.patch_size * cfg.patch_size;

    Parameters p;
    auto add_block = [&](const std::string& prefix, Component comp, int dim) {
        p.add(prefix + "ln1.g", comp, {dim});
        p.add(prefix + "ln1.b", comp, {dim});
        p.add(prefix + "attn.wq", comp, {dim, dim});
        p.add(prefix + "attn.bq", comp, {dim});
        p.add(prefix + "attn.wk", comp, {dim, dim});
        p.add(prefix + "attn.bk", comp, {dim});
        p.add(prefix + "attn.wv", comp, {dim, dim});
        p.add(prefix + "attn.bv", comp, {dim});
        p.add(prefix + "attn.wo", comp, {dim, dim});
        p.add(prefix + "attn.bo", comp, {dim});
        p.add(prefix + "ln2.g", comp, {dim});
        p.add(prefix + "ln2.b", comp, {dim});
        p.add(prefix + "mlp.w1", comp, {4 * dim, dim});
        p.add(prefix + "mlp.b1", comp, {4 * dim});
        p.add(prefix + "mlp.w2", comp, {dim, 4 * dim});
        p.add(prefix + "mlp.b2", comp, {dim});
    };

    p.add("enc.patch.w", Component::encoder, {E, pin});
    p.add("enc.patch.b", Component::encoder, {E});
    p.add("enc.pos", Component::encoder, {P, E});
    for (int l = 0; l < cfg.encoder_layers; ++l)
        add_block("enc.blk" + std::to_string(l) + ".", Component::encoder, E);
    p.add("enc.lnf.g", Component::encoder, {E});
    p.add("enc.lnf.b", Component::encoder, {E});

    p.add("proj.pool", Component::projector, {V, P});
    p.add("proj.w", Component::projector, {D, E});
    p.add("proj.b", Component::projector, {D});

    p.add("lm.embed", Component::lm, {C, D});
    p.add("lm.pos", Component::lm, {cfg.max_seq_len, D});
    for (int l = 0; l < cfg.lm_layers; ++l)
        add_block("lm.blk" + std::to_string(l) + ".", Component::lm, D);
    p.add("lm.lnf.g", Component::lm, {C == 0 ? 1 : D});
    p.add("lm.lnf.b", Component::lm, {D});
    p.add("lm.head", Component::lm, {C, D});

    // Fill. Weight matrices and embedding/positional tables draw gaussians in
    // schema order; biases stay zero and norm gains start at one.
    std::uint64_t k = 0;
    auto is_norm_gain = [](const std::string& name) {
        return name.size() >= 2 && name.compare(name.size() - 2, 2, ".g") == 0 &&
               name.find("ln") != std::string::npos;
    };
    auto is_bias = [](const std::string& name) {
        std::size_t dot = name.rfind('.');
        if (dot == std::string::npos) return false;
        std::string leaf = name.substr(dot + 1);
        return leaf == "b" || leaf == "bq" || leaf == "bk" || leaf == "bv" || leaf == "bo" ||
               leaf == "b1" || leaf == "b2";
    };
    for (auto& nt : p.tensors()) {
        if (is_norm_gain(nt.name)) {
            std::fill(nt.tensor.v.begin(), nt.tensor.v.end(), 1.0);
            continue;
        }
        if (is_bias(nt.name)) continue;  // zero
        if (cfg.init_scheme == InitScheme::structured && nt.name == "lm.head") continue;
        for (double& v : nt.tensor.v)
            v = kInitStd * counter_gaussian(cfg.init_seed, Stream::param_init, k++);
    }

    if (cfg.init_scheme == InitScheme::structured) {
        // Projector: well-conditioned frozen bottleneck.
        orthogonalize(p.at("proj.w"));
        Tensor& pool = p.at("proj.pool");
        if (V == P) {
            for (int i = 0; i < V; ++i) pool.v[static_cast<std::size_t>(i) * P + i] += 1.0;
        } else {
            for (double& v : pool.v) v += 1.0 / static_cast<double>(P);
        }
        // LM value/output maps get an identity component (mimetic-style
        // copy structure), and the head starts as the embedding table.
        for (int l = 0; l < cfg.lm_layers; ++l) {
            std::string bp = "lm.blk" + std::to_string(l) + ".attn.";
            for (const char* w : {"wv", "wo"}) {
                Tensor& t = p.at(bp + w);
                for (int i = 0; i < D; ++i)
                    t.v[static_cast<std::size_t>(i) * D + i] += kOvIdentity;
            }
        }
        p.at("lm.head").v = p.at("lm.embed").v;
    }
    return p;
}

Mat encode_image(const Parameters& p, const ModelConfig& cfg, const RgbImage& img,
                 EncoderCache* cache) {
    validate_config(cfg);
    if (img.width != cfg.image_size || img.height != cfg.image_size)
        throw DataError("encode_image: image is " + std::to_string(img.width) + "x" +
                        std::to_string(img.height) + ", model expects " +
                        std::to_string(cfg.image_size));
    validate_image(img);

    const int ps = cfg.patch_size;
    const int side = cfg.image_size / ps;
    const int P = side * side;
    const int pin = 3 * ps * ps;

    Mat patches(P, pin);
    for (int py = 0; py < side; ++py)
        for (int px = 0; px < side; ++px) {
            double* row = patches.row(py * side + px);
            int o = 0;
            for (int y = 0; y < ps; ++y)
                for (int x = 0; x < ps; ++x) {
                    std::size_t base =
                        (static_cast<std::size_t>(py * ps + y) * img.width + px * ps + x) * 3;
                    for (int c = 0; c < 3; ++c)
                        row[o++] = img.data[base + c] / 127.5 - 1.0;  // [-1, 1]
                }
        }

    Mat f;
    linear_forward(patches, p.at("enc.patch.w"), p.at("enc.patch.b"), f);
    const Tensor& pos = p.at("enc.pos");
    for (int r = 0; r < P; ++r) {
        double* fr = f.row(r);
        const double* qr = pos.v.data() + static_cast<std::size_t>(r) * cfg.encoder_dim;
        for (int d = 0; d < cfg.encoder_dim; ++d) fr[d] += qr[d];
    }

    EncoderCache local;
    EncoderCache& ec = cache ? *cache : local;
    ec.patches = std::move(patches);
    run_stack(p, "enc", cfg.encoder_layers, cfg.heads, /*causal=*/false, std::move(f), ec.stack);
    return ec.stack.lnf_out;
}

Mat project(const Parameters& p, const ModelConfig& cfg, const Mat& patch_features) {
    if (patch_features.rows != cfg.n_patches() || patch_features.cols != cfg.encoder_dim)
        throw DataError("project: patch feature shape mismatch");
    const Tensor& pool = p.at("proj.pool");
    const int V = cfg.n_visual_tokens, P = cfg.n_patches(), E = cfg.encoder_dim;
    Mat pooled(V, E);
    for (int i = 0; i < V; ++i) {
        double* ti = pooled.row(i);
        const double* wi = pool.v.data() + static_cast<std::size_t>(i) * P;
        for (int j = 0; j < P; ++j) {
            const double w = wi[j];
            const double* fj = patch_features.row(j);
            for (int d = 0; d < E; ++d) ti[d] += w * fj[d];
        }
    }
    Mat out;
    linear_forward(pooled, p.at("proj.w"), p.at("proj.b"), out);
    return out;
}

Mat forward_masked_logits(const Parameters& p, const ModelConfig& cfg, const Mat& visual_tokens,
                          const std::vector<int>& input_ids,
                          const std::vector<std::uint8_t>& logit_mask, LmCache* cache) {
    const Vocabulary& vocab = Vocabulary::standard();
    const int V = visual_tokens.rows;
    const int T = static_cast<int>(input_ids.size());
    const int D = cfg.lm_dim;
    const int S = V + T;
    if (visual_tokens.cols != D) throw DataError("forward: visual token width mismatch");
    if (V != cfg.n_visual_tokens) throw DataError("forward: visual token count mismatch");
    if (S > cfg.max_seq_len)
        throw DataError("forward: sequence length " + std::to_string(S) +
                        " exceeds max_seq_len " + std::to_string(cfg.max_seq_len));
    if (static_cast<int>(logit_mask.size()) != T)
        throw DataError("forward: logit mask length mismatch");

    const Tensor& embed = p.at("lm.embed");
    const Tensor& pos = p.at("lm.pos");
    Mat x(S, D);
    for (int i = 0; i < V; ++i) {
        const double* src = visual_tokens.row(i);
        double* dst = x.row(i);
        for (int d = 0; d < D; ++d) dst[d] = src[d];
    }
    for (int t = 0; t < T; ++t) {
        int id = input_ids[static_cast<std::size_t>(t)];
        if (id < 0 || id >= vocab.size()) throw DataError("forward: token id out of range");
        const double* er = embed.v.data() + static_cast<std::size_t>(id) * D;
        double* dst = x.row(V + t);
        for (int d = 0; d < D; ++d) dst[d] = er[d];
    }
    for (int s = 0; s < S; ++s) {
        double* xs = x.row(s);
        const double* qs = pos.v.data() + static_cast<std::size_t>(s) * D;
        for (int d = 0; d < D; ++d) xs[d] += qs[d];
    }

    LmCache local;
    LmCache& lc = cache ? *cache : local;
    lc.n_vis = V;
    lc.input_ids = input_ids;
    run_stack(p, "lm", cfg.lm_layers, cfg.heads, /*causal=*/true, std::move(x), lc.stack);

    const Tensor& head = p.at("lm.head");
    const int C = vocab.size();
    Mat logits(T, C);
    for (int t = 0; t < T; ++t) {
        if (!logit_mask[static_cast<std::size_t>(t)]) continue;
        const double* h = lc.stack.lnf_out.row(V + t);
        double* lt = logits.row(t);
        for (int c = 0; c < C; ++c) {
            const double* wc = head.v.data() + static_cast<std::size_t>(c) * D;
            double acc = 0.0;
            for (int d = 0; d < D; ++d) acc += h[d] * wc[d];
            lt[c] = acc;
        }
    }
    return logits;
}

Mat forward(const Parameters& p, const ModelConfig& cfg, const Mat& visual_tokens,
            const std::vector<int>& input_ids, LmCache* cache) {
    std::vector<std::uint8_t> all(input_ids.size(), 1);
    return forward_masked_logits(p, cfg, visual_tokens, input_ids, all, cache);
}

namespace {

Mat visual_tokens_for(const Parameters& p, const ModelConfig& cfg, const RgbImage& img) {
    return project(p, cfg, encode_image(p, cfg, img));
}

int argmax_row(const double* v, int n) {
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace

std::string generate(const Parameters& p, const ModelConfig& cfg, const RgbImage& img,
                     const std::string& prompt, int max_new_tokens) {
    if (prompt.find("<image>") == std::string::npos)
        throw DataError("generate: prompt must contain the <image> placeholder");
    if (max_new_tokens < 0) throw DataError("generate: max_new_tokens must be >= 0");
    const Vocabulary& vocab = Vocabulary::standard();

    Mat vis = visual_tokens_for(p, cfg, img);
    std::vector<int> ids;
    ids.push_back(vocab.bos());
    for (int id : vocab.tokenize(prompt)) ids.push_back(id);

    std::vector<int> generated;
    for (int step = 0; step < max_new_tokens; ++step) {
        if (cfg.n_visual_tokens + static_cast<int>(ids.size()) >= cfg.max_seq_len) break;
        std::vector<std::uint8_t> mask(ids.size(), 0);
        mask.back() = 1;
        Mat logits = forward_masked_logits(p, cfg, vis, ids, mask, nullptr);
        int next = argmax_row(logits.row(static_cast<int>(ids.size()) - 1), vocab.size());
        if (next == vocab.eos()) break;
        generated.push_back(next);
        ids.push_back(next);
    }
    return vocab.detokenize(generated);
}

std::vector<double> pooled_visual_embedding(const Parameters& p, const ModelConfig& cfg,
                                            const RgbImage& img) {
    Mat vis = visual_tokens_for(p, cfg, img);
    std::vector<double> out(static_cast<std::size_t>(vis.cols), 0.0);
    for (int r = 0; r < vis.rows; ++r) {
        const double* vr = vis.row(r);
        for (int d = 0; d < vis.cols; ++d) out[static_cast<std::size_t>(d)] += vr[d];
    }
    for (double& v : out) v /= static_cast<double>(vis.rows);
    return out;
}

std::vector<double> label_embedding(const Parameters& p, DistortionClass cls) {
    const Vocabulary& vocab = Vocabulary::standard();
    const Tensor& embed = p.at("lm.embed");
    const int D = embed.shape[1];
    int id = vocab.class_token(cls);
    std::vector<double> out(static_cast<std::size_t>(D));
    for (int d = 0; d < D; ++d) out[static_cast<std::size_t>(d)] =
        embed.v[static_cast<std::size_t>(id) * D + d];
    return out;
}

std::vector<double> degradation_slot_distribution(const Parameters& p, const ModelConfig& cfg,
                                                  const RgbImage& img,
                                                  std::vector<double>* raw_logits) {
    const Vocabulary& vocab = Vocabulary::standard();
    Mat vis = visual_tokens_for(p, cfg, img);
    std::vector<int> ids;
    ids.push_back(vocab.bos());
    for (int id : vocab.tokenize(render_prompt(PromptMode::finetune))) ids.push_back(id);
    for (int id : vocab.tokenize("the image has some")) ids.push_back(id);

    std::vector<std::uint8_t> mask(ids.size(), 0);
    mask.back() = 1;
    Mat logits = forward_masked_logits(p, cfg, vis, ids, mask, nullptr);
    const double* row = logits.row(static_cast<int>(ids.size()) - 1);
    const int C = vocab.size();
    if (raw_logits) raw_logits->assign(row, row + C);

    std::vector<double> probs(static_cast<std::size_t>(C));
    double mx = row[0];
    for (int c = 1; c < C; ++c) mx = std::max(mx, row[c]);
    double Z = 0.0;
    for (int c = 0; c < C; ++c) {
        probs[static_cast<std::size_t>(c)] = std::exp(row[c] - mx);
        Z += probs[static_cast<std::size_t>(c)];
    }
    for (double& v : probs) v /= Z;
    return probs;
}

}  // namespace perceptlab

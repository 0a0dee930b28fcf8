#include "tagaug/rnnlm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace tagaug {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y += s * x
void axpy(double s, const double* x, double* y, int n) {
    for (int k = 0; k < n; ++k) y[k] += s * x[k];
}

double dot(const double* x, const double* y, int n) {
    double s = 0;
    for (int k = 0; k < n; ++k) s += x[k] * y[k];
    return s;
}

} // namespace

LMParams LMParams::init(int vocab_size, int emb_dim, int hidden_dim, Rng& rng) {
    if (vocab_size < 4 || emb_dim < 1 || hidden_dim < 1)
        throw DomainError("bad model dimensions");
    LMParams p;
    p.vocab_size = vocab_size;
    p.emb_dim = emb_dim;
    p.hidden_dim = hidden_dim;
    auto fill_mat = [&](Mat& m, int r, int c) {
        m = Mat(r, c);
        for (auto& v : m.a) v = double(float(rng.uniform(-0.1, 0.1)));
    };
    auto fill_vec = [&](std::vector<double>& v, int n) {
        v.assign(size_t(n), 0.0);
        for (auto& x : v) x = double(float(rng.uniform(-0.1, 0.1)));
    };
    fill_mat(p.emb, vocab_size, emb_dim);
    fill_mat(p.w_in, hidden_dim, emb_dim);
    fill_mat(p.w_forget, hidden_dim, emb_dim);
    fill_mat(p.w_cell, hidden_dim, emb_dim);
    fill_mat(p.w_out, hidden_dim, emb_dim);
    fill_mat(p.u_in, hidden_dim, hidden_dim);
    fill_mat(p.u_forget, hidden_dim, hidden_dim);
    fill_mat(p.u_cell, hidden_dim, hidden_dim);
    fill_mat(p.u_out, hidden_dim, hidden_dim);
    fill_vec(p.b_in, hidden_dim);
    p.b_forget.assign(size_t(hidden_dim), 1.0); // keep memory open early on
    fill_vec(p.b_cell, hidden_dim);
    fill_vec(p.b_out_gate, hidden_dim);
    fill_mat(p.proj, hidden_dim, vocab_size);
    fill_vec(p.proj_bias, vocab_size);
    return p;
}

LMGrads::LMGrads(const LMParams& p)
    : emb(p.vocab_size, p.emb_dim),
      w_in(p.hidden_dim, p.emb_dim), w_forget(p.hidden_dim, p.emb_dim),
      w_cell(p.hidden_dim, p.emb_dim), w_out(p.hidden_dim, p.emb_dim),
      u_in(p.hidden_dim, p.hidden_dim), u_forget(p.hidden_dim, p.hidden_dim),
      u_cell(p.hidden_dim, p.hidden_dim), u_out(p.hidden_dim, p.hidden_dim),
      b_in(size_t(p.hidden_dim), 0.0), b_forget(size_t(p.hidden_dim), 0.0),
      b_cell(size_t(p.hidden_dim), 0.0), b_out_gate(size_t(p.hidden_dim), 0.0),
      proj(p.hidden_dim, p.vocab_size), proj_bias(size_t(p.vocab_size), 0.0) {}

void LMGrads::zero() {
    emb.zero();
    w_in.zero(); w_forget.zero(); w_cell.zero(); w_out.zero();
    u_in.zero(); u_forget.zero(); u_cell.zero(); u_out.zero();
    std::fill(b_in.begin(), b_in.end(), 0.0);
    std::fill(b_forget.begin(), b_forget.end(), 0.0);
    std::fill(b_cell.begin(), b_cell.end(), 0.0);
    std::fill(b_out_gate.begin(), b_out_gate.end(), 0.0);
    proj.zero();
    std::fill(proj_bias.begin(), proj_bias.end(), 0.0);
}

namespace {

template <typename F>
void for_each_tensor(LMGrads& g, F f) {
    f(g.emb.a);
    f(g.w_in.a); f(g.w_forget.a); f(g.w_cell.a); f(g.w_out.a);
    f(g.u_in.a); f(g.u_forget.a); f(g.u_cell.a); f(g.u_out.a);
    f(g.b_in); f(g.b_forget); f(g.b_cell); f(g.b_out_gate);
    f(g.proj.a); f(g.proj_bias);
}

} // namespace

double LMGrads::global_norm() const {
    double sq = 0;
    for_each_tensor(const_cast<LMGrads&>(*this), [&](std::vector<double>& t) {
        for (double v : t) sq += v * v;
    });
    return std::sqrt(sq);
}

void LMGrads::scale(double s) {
    for_each_tensor(*this, [&](std::vector<double>& t) {
        for (double& v : t) v *= s;
    });
}

DropoutMasks DropoutMasks::sample(int n, int emb_dim, int hidden_dim, double dropout, Rng& rng) {
    if (dropout < 0 || dropout >= 1) throw DomainError("dropout must be in [0, 1)");
    DropoutMasks m;
    m.emb_site = Mat(n, emb_dim);
    m.out_site = Mat(n, hidden_dim);
    double keep = 1.0 - dropout;
    double inv = 1.0 / keep;
    for (auto& v : m.emb_site.a) v = rng.bernoulli(keep) ? inv : 0.0;
    for (auto& v : m.out_site.a) v = rng.bernoulli(keep) ? inv : 0.0;
    return m;
}

namespace {

// Everything backward needs from a forward pass over `steps` inputs.
struct ForwardCache {
    int steps = 0;
    Mat d_in;    // steps x d, post-dropout embeddings
    Mat gi, gf, gc, go; // steps x r, gate activations
    Mat cell, tc, hid;  // steps x r
    Mat d_out;   // steps x r, post-dropout hidden states
    Mat probs;   // steps x V
};

void check_ids(const LMParams& p, const std::vector<int>& ids) {
    for (int id : ids)
        if (id < 0 || id >= p.vocab_size)
            throw DomainError("token id out of range: " + std::to_string(id));
}

// Runs the net over ids[0..steps), filling the cache.
void run_forward(const LMParams& p, const std::vector<int>& ids, int steps,
                 const DropoutMasks* masks, ForwardCache& fc) {
    int d = p.emb_dim, r = p.hidden_dim, V = p.vocab_size;
    if (masks && (masks->emb_site.rows < steps || masks->out_site.rows < steps))
        throw DomainError("dropout masks shorter than the sequence");
    fc.steps = steps;
    fc.d_in = Mat(steps, d);
    fc.gi = Mat(steps, r); fc.gf = Mat(steps, r);
    fc.gc = Mat(steps, r); fc.go = Mat(steps, r);
    fc.cell = Mat(steps, r); fc.tc = Mat(steps, r); fc.hid = Mat(steps, r);
    fc.d_out = Mat(steps, r);
    fc.probs = Mat(steps, V);

    std::vector<double> h_prev(size_t(r), 0.0), c_prev(size_t(r), 0.0);
    for (int t = 0; t < steps; ++t) {
        const double* e = p.emb.row(ids[size_t(t)]);
        double* din = fc.d_in.row(t);
        if (masks) {
            const double* m = masks->emb_site.row(t);
            for (int k = 0; k < d; ++k) din[k] = e[k] * m[k];
        } else {
            std::copy(e, e + d, din);
        }
        double* i_t = fc.gi.row(t);
        double* f_t = fc.gf.row(t);
        double* g_t = fc.gc.row(t);
        double* o_t = fc.go.row(t);
        for (int j = 0; j < r; ++j) {
            i_t[j] = sigmoid(dot(p.w_in.row(j), din, d) + dot(p.u_in.row(j), h_prev.data(), r) + p.b_in[size_t(j)]);
            f_t[j] = sigmoid(dot(p.w_forget.row(j), din, d) + dot(p.u_forget.row(j), h_prev.data(), r) + p.b_forget[size_t(j)]);
            g_t[j] = std::tanh(dot(p.w_cell.row(j), din, d) + dot(p.u_cell.row(j), h_prev.data(), r) + p.b_cell[size_t(j)]);
            o_t[j] = sigmoid(dot(p.w_out.row(j), din, d) + dot(p.u_out.row(j), h_prev.data(), r) + p.b_out_gate[size_t(j)]);
        }
        double* c_t = fc.cell.row(t);
        double* tc_t = fc.tc.row(t);
        double* h_t = fc.hid.row(t);
        double* dout = fc.d_out.row(t);
        for (int j = 0; j < r; ++j) {
            c_t[j] = f_t[j] * c_prev[size_t(j)] + i_t[j] * g_t[j];
            tc_t[j] = std::tanh(c_t[j]);
            h_t[j] = o_t[j] * tc_t[j];
        }
        if (masks) {
            const double* m = masks->out_site.row(t);
            for (int j = 0; j < r; ++j) dout[j] = h_t[j] * m[j];
        } else {
            std::copy(h_t, h_t + r, dout);
        }
        double* s = fc.probs.row(t); // logits first, softmax in place
        std::copy(p.proj_bias.begin(), p.proj_bias.end(), s);
        for (int j = 0; j < r; ++j) axpy(dout[j], p.proj.row(j), s, V);
        double mx = *std::max_element(s, s + V);
        double z = 0;
        for (int v = 0; v < V; ++v) {
            s[v] = std::exp(s[v] - mx);
            z += s[v];
        }
        for (int v = 0; v < V; ++v) s[v] /= z;
        std::copy(c_t, c_t + r, c_prev.data());
        std::copy(h_t, h_t + r, h_prev.data());
    }
}

} // namespace

std::vector<std::vector<double>> lm_forward(const LMParams& p, const std::vector<int>& ids,
                                            const DropoutMasks* masks) {
    if (ids.empty()) throw DomainError("empty input sequence");
    check_ids(p, ids);
    ForwardCache fc;
    run_forward(p, ids, int(ids.size()), masks, fc);
    std::vector<std::vector<double>> out(ids.size());
    for (size_t t = 0; t < ids.size(); ++t) {
        const double* row = fc.probs.row(int(t));
        out[t].assign(row, row + p.vocab_size);
    }
    return out;
}

double sequence_nll(const LMParams& p, const std::vector<int>& ids) {
    if (ids.size() < 2) throw DomainError("sequence must hold at least two tokens");
    check_ids(p, ids);
    ForwardCache fc;
    int steps = int(ids.size()) - 1;
    run_forward(p, ids, steps, nullptr, fc);
    double nll = 0;
    for (int t = 0; t < steps; ++t) nll -= std::log(fc.probs.at(t, ids[size_t(t) + 1]));
    return nll;
}

double perplexity(const LMParams& p, const std::vector<std::vector<int>>& seqs) {
    if (seqs.empty()) throw DomainError("no sequences");
    double nll = 0;
    size_t targets = 0;
    for (const auto& ids : seqs) {
        nll += sequence_nll(p, ids);
        targets += ids.size() - 1;
    }
    return std::exp(nll / double(targets));
}

std::pair<double, int> lm_backward(const LMParams& p, const std::vector<int>& ids,
                                   const DropoutMasks* masks, LMGrads& grads,
                                   int pad_mask_id) {
    if (ids.size() < 2) throw DomainError("sequence must hold at least two tokens");
    check_ids(p, ids);
    int d = p.emb_dim, r = p.hidden_dim, V = p.vocab_size;
    int steps = int(ids.size()) - 1;
    ForwardCache fc;
    run_forward(p, ids, steps, masks, fc);

    double nll = 0;
    int counted = 0;
    std::vector<double> ds(size_t(V), 0.0);
    std::vector<double> dh(size_t(r), 0.0), dc(size_t(r), 0.0);
    std::vector<double> da_i(size_t(r), 0.0), da_f(size_t(r), 0.0);
    std::vector<double> da_g(size_t(r), 0.0), da_o(size_t(r), 0.0);
    std::vector<double> dd(size_t(d), 0.0);
    for (int t = steps - 1; t >= 0; --t) {
        int target = ids[size_t(t) + 1];
        bool live = target != pad_mask_id;
        const double* probs = fc.probs.row(t);
        const double* dout = fc.d_out.row(t);
        if (live) {
            nll -= std::log(probs[target]);
            ++counted;
            std::copy(probs, probs + V, ds.data());
            ds[size_t(target)] -= 1.0;
            for (int j = 0; j < r; ++j) axpy(dout[j], ds.data(), grads.proj.row(j), V);
            axpy(1.0, ds.data(), grads.proj_bias.data(), V);
            for (int j = 0; j < r; ++j) dh[size_t(j)] += dot(p.proj.row(j), ds.data(), V) *
                (masks ? masks->out_site.at(t, j) : 1.0);
        }
        const double* i_t = fc.gi.row(t);
        const double* f_t = fc.gf.row(t);
        const double* g_t = fc.gc.row(t);
        const double* o_t = fc.go.row(t);
        const double* tc_t = fc.tc.row(t);
        const double* c_prev = t > 0 ? fc.cell.row(t - 1) : nullptr;
        const double* h_prev = t > 0 ? fc.hid.row(t - 1) : nullptr;
        for (int j = 0; j < r; ++j) {
            double dh_j = dh[size_t(j)];
            double do_j = dh_j * tc_t[j];
            double dc_j = dh_j * o_t[j] * (1.0 - tc_t[j] * tc_t[j]) + dc[size_t(j)];
            double di_j = dc_j * g_t[j];
            double df_j = dc_j * (t > 0 ? c_prev[j] : 0.0);
            double dg_j = dc_j * i_t[j];
            da_i[size_t(j)] = di_j * i_t[j] * (1.0 - i_t[j]);
            da_f[size_t(j)] = df_j * f_t[j] * (1.0 - f_t[j]);
            da_g[size_t(j)] = dg_j * (1.0 - g_t[j] * g_t[j]);
            da_o[size_t(j)] = do_j * o_t[j] * (1.0 - o_t[j]);
            dc[size_t(j)] = dc_j * f_t[j]; // carried to step t-1
        }
        const double* din = fc.d_in.row(t);
        std::fill(dd.begin(), dd.end(), 0.0);
        std::fill(dh.begin(), dh.end(), 0.0);
        for (int j = 0; j < r; ++j) {
            double ai = da_i[size_t(j)], af = da_f[size_t(j)];
            double ag = da_g[size_t(j)], ao = da_o[size_t(j)];
            axpy(ai, din, grads.w_in.row(j), d);
            axpy(af, din, grads.w_forget.row(j), d);
            axpy(ag, din, grads.w_cell.row(j), d);
            axpy(ao, din, grads.w_out.row(j), d);
            if (t > 0) {
                axpy(ai, h_prev, grads.u_in.row(j), r);
                axpy(af, h_prev, grads.u_forget.row(j), r);
                axpy(ag, h_prev, grads.u_cell.row(j), r);
                axpy(ao, h_prev, grads.u_out.row(j), r);
                axpy(ai, p.u_in.row(j), dh.data(), r);
                axpy(af, p.u_forget.row(j), dh.data(), r);
                axpy(ag, p.u_cell.row(j), dh.data(), r);
                axpy(ao, p.u_out.row(j), dh.data(), r);
            }
            grads.b_in[size_t(j)] += ai;
            grads.b_forget[size_t(j)] += af;
            grads.b_cell[size_t(j)] += ag;
            grads.b_out_gate[size_t(j)] += ao;
            axpy(ai, p.w_in.row(j), dd.data(), d);
            axpy(af, p.w_forget.row(j), dd.data(), d);
            axpy(ag, p.w_cell.row(j), dd.data(), d);
            axpy(ao, p.w_out.row(j), dd.data(), d);
        }
        double* ge = grads.emb.row(ids[size_t(t)]);
        if (masks) {
            const double* m = masks->emb_site.row(t);
            for (int k = 0; k < d; ++k) ge[k] += dd[size_t(k)] * m[k];
        } else {
            axpy(1.0, dd.data(), ge, d);
        }
    }
    return {nll, counted};
}

std::vector<int> encode_for_lm(const LinearizedSequence& seq, const Vocabulary& vocab,
                               bool condition_after_bos) {
    if (seq.empty()) throw DomainError("empty sequence");
    std::vector<int> ids;
    ids.reserve(seq.size() + 2);
    ids.push_back(Vocabulary::bos_id);
    for (const auto& tok : seq) ids.push_back(vocab.encode(tok));
    ids.push_back(Vocabulary::eos_id);
    if (!condition_after_bos && is_condition_token(seq[0])) std::swap(ids[0], ids[1]);
    return ids;
}

namespace {

void apply_sgd(LMParams& p, const LMGrads& g, double lr) {
    auto upd = [&](std::vector<double>& w, const std::vector<double>& gw) {
        for (size_t i = 0; i < w.size(); ++i) w[i] -= lr * gw[i];
    };
    upd(p.emb.a, g.emb.a);
    upd(p.w_in.a, g.w_in.a); upd(p.w_forget.a, g.w_forget.a);
    upd(p.w_cell.a, g.w_cell.a); upd(p.w_out.a, g.w_out.a);
    upd(p.u_in.a, g.u_in.a); upd(p.u_forget.a, g.u_forget.a);
    upd(p.u_cell.a, g.u_cell.a); upd(p.u_out.a, g.u_out.a);
    upd(p.b_in, g.b_in); upd(p.b_forget, g.b_forget);
    upd(p.b_cell, g.b_cell); upd(p.b_out_gate, g.b_out_gate);
    upd(p.proj.a, g.proj.a); upd(p.proj_bias, g.proj_bias);
}

} // namespace

LMCheckpoint train_lm(const std::vector<LinearizedSequence>& train,
                      const std::vector<LinearizedSequence>& dev,
                      const Vocabulary& vocab, const TrainConfig& config,
                      std::vector<EpochStats>* log) {
    if (train.empty()) throw DomainError("no training sequences");
    if (dev.empty()) throw DomainError("no dev sequences");
    if (config.batch_size < 1 || config.max_epochs < 1 || config.patience < 1)
        throw DomainError("bad training configuration");

    std::vector<std::vector<int>> train_ids, dev_ids;
    train_ids.reserve(train.size());
    for (const auto& s : train) train_ids.push_back(encode_for_lm(s, vocab, config.condition_after_bos));
    dev_ids.reserve(dev.size());
    for (const auto& s : dev) dev_ids.push_back(encode_for_lm(s, vocab, config.condition_after_bos));

    Rng rng(config.seed);
    LMParams params = LMParams::init(vocab.size(), config.emb_dim, config.hidden_dim, rng);
    LMGrads grads(params);

    LMCheckpoint best;
    best.vocab = vocab;
    best.config = config;
    best.avg_train_len = average_linearized_length(train);

    double lr = config.lr0;
    int bad_streak = 0;
    std::vector<size_t> order(train_ids.size());
    std::iota(order.begin(), order.end(), size_t(0));

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_nll = 0;
        size_t epoch_targets = 0;
        for (size_t from = 0; from < order.size(); from += size_t(config.batch_size)) {
            size_t to = std::min(order.size(), from + size_t(config.batch_size));
            grads.zero();
            double batch_nll = 0;
            int batch_targets = 0;
            for (size_t k = from; k < to; ++k) {
                const auto& ids = train_ids[order[k]];
                if (config.dropout > 0) {
                    DropoutMasks masks = DropoutMasks::sample(int(ids.size()) - 1, config.emb_dim,
                                                              config.hidden_dim, config.dropout, rng);
                    auto [nll, n] = lm_backward(params, ids, &masks, grads, Vocabulary::pad_id);
                    batch_nll += nll;
                    batch_targets += n;
                } else {
                    auto [nll, n] = lm_backward(params, ids, nullptr, grads, Vocabulary::pad_id);
                    batch_nll += nll;
                    batch_targets += n;
                }
            }
            if (batch_targets == 0) continue;
            // summed token losses: early updates ride the clip (fixed-norm
            // steps), the plateau decays anneal the step size from there
            double norm = grads.global_norm();
            if (norm > config.grad_clip) grads.scale(config.grad_clip / norm);
            apply_sgd(params, grads, lr);
            epoch_nll += batch_nll;
            epoch_targets += size_t(batch_targets);
        }
        double dev_ppl = perplexity(params, dev_ids);
        bool improved = dev_ppl < best.dev_perplexity;
        if (log)
            log->push_back({epoch, lr, epoch_targets ? epoch_nll / double(epoch_targets) : 0.0,
                            dev_ppl, improved});
        if (improved) {
            best.dev_perplexity = dev_ppl;
            best.params = params;
            bad_streak = 0;
        } else {
            ++bad_streak;
            lr *= config.lr_decay;
            if (bad_streak >= config.patience) break;
        }
        if (best.params.vocab_size == 0) {
            // dev perplexity can stay infinite on degenerate data; keep
            // the latest weights so the checkpoint is still usable
            best.params = params;
        }
    }
    return best;
}

// --- checkpoint serialization ----------------------------------------------

namespace {

constexpr char kMagic[4] = {'D', 'A', 'G', 'A'};

void put_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError("truncated checkpoint");
    return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

void put_f32_block(std::ostream& out, const std::vector<double>& v) {
    for (double x : v) put_u32(out, std::bit_cast<uint32_t>(float(x)));
}

void get_f32_block(std::istream& in, std::vector<double>& v, size_t n) {
    v.resize(n);
    for (size_t i = 0; i < n; ++i) v[i] = double(std::bit_cast<float>(get_u32(in)));
}

void put_string(std::ostream& out, const std::string& s) {
    put_u32(out, uint32_t(s.size()));
    out.write(s.data(), std::streamsize(s.size()));
}

std::string get_string(std::istream& in) {
    uint32_t n = get_u32(in);
    if (n > (1u << 24)) throw FormatError("unreasonable string length in checkpoint");
    std::string s(n, '\0');
    if (n && !in.read(s.data(), std::streamsize(n))) throw FormatError("truncated checkpoint");
    return s;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void save_checkpoint(std::ostream& out, const LMCheckpoint& c) {
    out.write(kMagic, 4);
    put_u32(out, c.format_version);
    put_u32(out, uint32_t(c.vocab.size()));
    for (const auto& tok : c.vocab.tokens()) put_string(out, tok);
    put_u32(out, uint32_t(c.params.vocab_size));
    put_u32(out, uint32_t(c.params.emb_dim));
    put_u32(out, uint32_t(c.params.hidden_dim));
    put_f32_block(out, c.params.emb.a);
    put_f32_block(out, c.params.w_in.a);
    put_f32_block(out, c.params.w_forget.a);
    put_f32_block(out, c.params.w_cell.a);
    put_f32_block(out, c.params.w_out.a);
    put_f32_block(out, c.params.u_in.a);
    put_f32_block(out, c.params.u_forget.a);
    put_f32_block(out, c.params.u_cell.a);
    put_f32_block(out, c.params.u_out.a);
    put_f32_block(out, c.params.b_in);
    put_f32_block(out, c.params.b_forget);
    put_f32_block(out, c.params.b_cell);
    put_f32_block(out, c.params.b_out_gate);
    put_f32_block(out, c.params.proj.a);
    put_f32_block(out, c.params.proj_bias);

    std::ostringstream kv;
    kv << "lr0=" << fmt_double(c.config.lr0) << '\n'
       << "batch_size=" << c.config.batch_size << '\n'
       << "lr_decay=" << fmt_double(c.config.lr_decay) << '\n'
       << "max_epochs=" << c.config.max_epochs << '\n'
       << "patience=" << c.config.patience << '\n'
       << "dropout=" << fmt_double(c.config.dropout) << '\n'
       << "grad_clip=" << fmt_double(c.config.grad_clip) << '\n'
       << "seed=" << c.config.seed << '\n'
       << "emb_dim=" << c.config.emb_dim << '\n'
       << "hidden_dim=" << c.config.hidden_dim << '\n'
       << "condition_after_bos=" << (c.config.condition_after_bos ? 1 : 0) << '\n'
       << "dev_perplexity=" << fmt_double(c.dev_perplexity) << '\n'
       << "avg_train_len=" << c.avg_train_len << '\n';
    put_string(out, kv.str());
    if (!out) throw FormatError("checkpoint write failed");
}

LMCheckpoint load_checkpoint(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("not a checkpoint file");
    LMCheckpoint c;
    c.format_version = get_u32(in);
    if (c.format_version != 1)
        throw FormatError("unsupported checkpoint version " + std::to_string(c.format_version));
    uint32_t vocab_count = get_u32(in);
    std::vector<std::string> tokens;
    tokens.reserve(vocab_count);
    for (uint32_t i = 0; i < vocab_count; ++i) tokens.push_back(get_string(in));
    c.vocab = Vocabulary::from_tokens(tokens);
    uint32_t V = get_u32(in), d = get_u32(in), r = get_u32(in);
    if (V != vocab_count) throw FormatError("vocabulary size does not match tensor dimensions");
    if (d == 0 || r == 0 || V < 4) throw FormatError("bad checkpoint dimensions");
    c.params.vocab_size = int(V);
    c.params.emb_dim = int(d);
    c.params.hidden_dim = int(r);
    auto read_mat = [&](Mat& m, uint32_t rows, uint32_t cols) {
        m.rows = int(rows);
        m.cols = int(cols);
        get_f32_block(in, m.a, size_t(rows) * size_t(cols));
    };
    read_mat(c.params.emb, V, d);
    read_mat(c.params.w_in, r, d);
    read_mat(c.params.w_forget, r, d);
    read_mat(c.params.w_cell, r, d);
    read_mat(c.params.w_out, r, d);
    read_mat(c.params.u_in, r, r);
    read_mat(c.params.u_forget, r, r);
    read_mat(c.params.u_cell, r, r);
    read_mat(c.params.u_out, r, r);
    get_f32_block(in, c.params.b_in, r);
    get_f32_block(in, c.params.b_forget, r);
    get_f32_block(in, c.params.b_cell, r);
    get_f32_block(in, c.params.b_out_gate, r);
    read_mat(c.params.proj, r, V);
    get_f32_block(in, c.params.proj_bias, V);

    std::istringstream kv(get_string(in));
    std::string line;
    while (std::getline(kv, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        if (key == "lr0") c.config.lr0 = std::stod(val);
        else if (key == "batch_size") c.config.batch_size = std::stoi(val);
        else if (key == "lr_decay") c.config.lr_decay = std::stod(val);
        else if (key == "max_epochs") c.config.max_epochs = std::stoi(val);
        else if (key == "patience") c.config.patience = std::stoi(val);
        else if (key == "dropout") c.config.dropout = std::stod(val);
        else if (key == "grad_clip") c.config.grad_clip = std::stod(val);
        else if (key == "seed") c.config.seed = std::stoull(val);
        else if (key == "emb_dim") c.config.emb_dim = std::stoi(val);
        else if (key == "hidden_dim") c.config.hidden_dim = std::stoi(val);
        else if (key == "condition_after_bos") c.config.condition_after_bos = val != "0";
        else if (key == "dev_perplexity") c.dev_perplexity = std::stod(val);
        else if (key == "avg_train_len") c.avg_train_len = std::stoi(val);
    }
    return c;
}

} // namespace tagaug

#pragma once

#include "tagaug/corpus.hpp"
#include "tagaug/rng.hpp"

#include <iosfwd>
#include <limits>

namespace tagaug {

// Dense row-major matrix of doubles. Compute happens in double precision;
// checkpoints quantize to 32-bit floats on disk.
struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(size_t(r) * size_t(c), 0.0) {}

    double* row(int r) { return a.data() + size_t(r) * size_t(cols); }
    const double* row(int r) const { return a.data() + size_t(r) * size_t(cols); }
    double& at(int r, int c) { return a[size_t(r) * size_t(cols) + size_t(c)]; }
    double at(int r, int c) const { return a[size_t(r) * size_t(cols) + size_t(c)]; }
    void zero() { std::fill(a.begin(), a.end(), 0.0); }
    bool operator==(const Mat&) const = default;
};

// One-layer LSTM language model: embedding -> dropout -> LSTM -> dropout
// -> output projection -> softmax.
struct LMParams {
    int vocab_size = 0;
    int emb_dim = 0;
    int hidden_dim = 0;

    Mat emb;                                    // V x d
    Mat w_in, w_forget, w_cell, w_out;          // r x d, input-to-gate
    Mat u_in, u_forget, u_cell, u_out;          // r x r, recurrent
    std::vector<double> b_in, b_forget, b_cell, b_out_gate; // r
    Mat proj;                                   // r x V
    std::vector<double> proj_bias;              // V

    bool operator==(const LMParams&) const = default;

    // Uniform(-0.1, 0.1) everywhere, except the forget-gate bias which
    // starts at +1 to keep early memory open. Draws are quantized to
    // float32 so a freshly initialized model survives checkpointing
    // bit-for-bit.
    static LMParams init(int vocab_size, int emb_dim, int hidden_dim, Rng& rng);
};

// Gradients mirror the parameter shapes.
struct LMGrads {
    Mat emb;
    Mat w_in, w_forget, w_cell, w_out;
    Mat u_in, u_forget, u_cell, u_out;
    std::vector<double> b_in, b_forget, b_cell, b_out_gate;
    Mat proj;
    std::vector<double> proj_bias;

    explicit LMGrads(const LMParams& p);
    void zero();
    double global_norm() const;
    void scale(double s);
};

// Inverted-dropout masks for one sequence: entries are 0 or 1/keep.
// Supplied only during training; inference paths pass nullptr.
struct DropoutMasks {
    Mat emb_site; // N x d, applied to embeddings
    Mat out_site; // N x r, applied to LSTM outputs

    static DropoutMasks sample(int n, int emb_dim, int hidden_dim, double dropout, Rng& rng);
};

// Next-token distributions: out[t] is the length-V distribution over the
// token following ids[0..t]. Softmax subtracts the max logit before
// exponentiation. Throws DomainError for ids outside [0, V).
std::vector<std::vector<double>> lm_forward(const LMParams& p, const std::vector<int>& ids,
                                            const DropoutMasks* masks = nullptr);

// Total negative log-likelihood of ids[1..] given ids[..n-2]; the sequence
// must carry [BOS] up front and [EOS] at the end (length >= 2).
double sequence_nll(const LMParams& p, const std::vector<int>& ids);

// exp(total NLL / total predicted tokens) over a batch of sequences.
double perplexity(const LMParams& p, const std::vector<std::vector<int>>& seqs);

// Forward + backprop through time for one sequence, accumulating into
// `grads` (callers zero or reuse across a batch). Positions whose target
// is `pad_mask_id` (>= 0) contribute nothing. Returns {nll, target count}.
std::pair<double, int> lm_backward(const LMParams& p, const std::vector<int>& ids,
                                   const DropoutMasks* masks, LMGrads& grads,
                                   int pad_mask_id = -1);

struct TrainConfig {
    double lr0 = 1.0;
    int batch_size = 32;
    double lr_decay = 0.5;
    int max_epochs = 30;
    int patience = 3;
    double dropout = 0.5;
    double grad_clip = 5.0;
    uint64_t seed = 1;
    int emb_dim = 300;
    int hidden_dim = 512;
    bool condition_after_bos = true; // loader order: [BOS], condition, tokens
};

struct EpochStats {
    int epoch = 0;       // 1-based
    double lr = 0;       // rate used for this epoch's updates
    double train_nll = 0;
    double dev_perplexity = 0;
    bool improved = false;
};

struct LMCheckpoint {
    uint32_t format_version = 1;
    Vocabulary vocab;
    LMParams params;
    TrainConfig config;
    double dev_perplexity = std::numeric_limits<double>::infinity();
    int avg_train_len = 0; // mean gold sequence length, for generation caps
};

// [BOS] + encoded tokens + [EOS]. A condition token at position 0 stays
// right after [BOS] by default; condition_after_bos=false puts it before.
std::vector<int> encode_for_lm(const LinearizedSequence& seq, const Vocabulary& vocab,
                               bool condition_after_bos = true);

// Plain SGD with the decay-on-plateau schedule: whenever dev perplexity
// fails to improve on the best seen, the rate is halved for the next
// epoch; `patience` consecutive failures stop training. The checkpoint
// returned is the best dev model, not the last. Single-threaded and
// bit-deterministic for a given seed.
LMCheckpoint train_lm(const std::vector<LinearizedSequence>& train,
                      const std::vector<LinearizedSequence>& dev,
                      const Vocabulary& vocab, const TrainConfig& config,
                      std::vector<EpochStats>* log = nullptr);

// Binary checkpoint serialization (little-endian, float32 tensors).
void save_checkpoint(std::ostream& out, const LMCheckpoint& c);
LMCheckpoint load_checkpoint(std::istream& in);

} // namespace tagaug

#pragma once

#include <string>

namespace qagen::model {

// Width profile for every network. `paper` mirrors the published sizes,
// `desk` divides the recurrent widths for CPU-sized runs.
struct ModelDims {
  int d_emb = 64;         // word/type/position embedding width (tied output layer)
  int d_ctx = 128;        // contextual embedder output
  int enc_width = 64;     // per-direction width: prior/posterior/answer BiLSTMs
  int qg_enc_width = 112; // per-direction width: question encoder (2 layers)
  int z_q_dim = 50;
  int z_a_blocks = 20;
  int z_a_classes = 10;
  int max_positions = 512;
  int ctx_layers = 2;  // self-attention layers in the contextual embedder

  int qg_dec_width() const { return 2 * qg_enc_width; }
  int d_answer_hidden() const { return 2 * enc_width; }

  static ModelDims desk() { return ModelDims{}; }

  static ModelDims paper() {
    ModelDims d;
    d.d_emb = 768;
    d.d_ctx = 768;
    d.enc_width = 300;
    d.qg_enc_width = 450;
    return d;
  }

  static ModelDims named(const std::string& profile) {
    if (profile == "paper") return paper();
    return desk();
  }
};

}  // namespace qagen::model

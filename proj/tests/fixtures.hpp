// A small hand-built pipeline case whose prefilter outcome is known by
// construction.
#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "bitext/corpus.hpp"
#include "bitext/harness.hpp"
#include "bitext/io.hpp"
#include "bitext/pipeline.hpp"

namespace fixture {

struct CraftedCase {
  bitext::PipelineConfig config;
  std::vector<bool> rejected;
};

// 50 noisy pairs: copies, half-copies, wrong-language sides (per label file)
// and clean-looking pairs; plus 40 clean pairs, embeddings and log-probs.
inline CraftedCase crafted_case(const std::filesystem::path& dir, std::uint64_t seed = 5) {
  using namespace bitext;
  std::filesystem::create_directories(dir);
  const std::size_t n = 50, n_clean = 40, dim = 16;
  const auto base = synthetic_clean_corpus(n + n_clean, seed);
  std::vector<std::string> src, tgt;
  std::vector<NoiseType> kinds;
  LangLabels sl, tl;
  CraftedCase out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s = base[i].src_text, t = base[i].tgt_text;
    std::string slang = "si", tlang = "en";
    bool reject = true;
    switch (i % 5) {
      case 0: t = s; break;                                  // full copy
      case 1: {                                              // 3 of 4 source tokens reused
        const auto words = split(s, ' ');
        t = std::string(words[0]) + " " + std::string(words[1]) + " " + std::string(words[2]) +
            " extra";
        s = std::string(words[0]) + " " + std::string(words[1]) + " " + std::string(words[2]) +
            " " + std::string(words[3]);
        break;
      }
      case 2: (i % 2 ? slang : tlang) = "ru"; break;         // wrong language on one side
      default: reject = false; break;
    }
    src.push_back(s);
    tgt.push_back(t);
    sl.lang.push_back(slang);
    tl.lang.push_back(tlang);
    sl.confidence.push_back(0.99);
    tl.confidence.push_back(0.99);
    kinds.push_back(reject ? NoiseType::misaligned : NoiseType::aligned);
    out.rejected.push_back(reject);
  }
  const auto noisy = PairCorpus::from_texts(src, tgt, "si", "en");
  std::vector<std::string> cs, ct;
  for (std::size_t i = n; i < n + n_clean; ++i) {
    cs.push_back(base[i].src_text);
    ct.push_back(base[i].tgt_text);
  }
  const auto clean = PairCorpus::from_texts(cs, ct, "si", "en");
  write_parallel(noisy, dir / "noisy.src", dir / "noisy.tgt");
  write_parallel(clean, dir / "clean.src", dir / "clean.tgt");
  write_lang_labels(sl, dir / "lid.src.tsv");
  write_lang_labels(tl, dir / "lid.tgt.tsv");

  const auto emb = synthetic_embeddings(kinds, dim, 0.1, seed + 1);
  write_embeddings(emb.src.vectors(), dir / "noisy.src.emb");
  write_embeddings(emb.tgt.vectors(), dir / "noisy.tgt.emb");
  const std::vector<NoiseType> aligned(n_clean, NoiseType::aligned);
  const auto cemb = synthetic_embeddings(aligned, dim, 0.1, seed + 2, Origin::clean);
  write_embeddings(cemb.src.vectors(), dir / "clean.src.emb");
  write_embeddings(cemb.tgt.vectors(), dir / "clean.tgt.emb");

  std::mt19937_64 rng(seed + 3);
  auto logprobs = [&](std::size_t rows, bool noisy_rows, const std::string& name) {
    std::string text;
    for (std::size_t i = 0; i < rows; ++i) {
      const double level = noisy_rows && kinds[i] != NoiseType::aligned ? -4.0 : -1.0;
      std::uniform_real_distribution<double> u(level - 0.5, level + 0.5);
      text += std::to_string(i) + '\t';
      for (std::size_t t = 0; t < 3 + i % 5; ++t) {
        if (t) text += ' ';
        text += format_double(std::min(0.0, u(rng)));
      }
      text += '\n';
    }
    write_file_atomic(dir / name, text);
  };
  logprobs(n, true, "fwd.tsv");
  logprobs(n, true, "bwd.tsv");
  logprobs(n_clean, false, "clean_fwd.tsv");
  logprobs(n_clean, false, "clean_bwd.tsv");

  auto& c = out.config;
  c.src = dir / "noisy.src";
  c.tgt = dir / "noisy.tgt";
  c.src_lang = "si";
  c.tgt_lang = "en";
  c.src_emb = dir / "noisy.src.emb";
  c.tgt_emb = dir / "noisy.tgt.emb";
  c.dim = dim;
  c.clean_src = dir / "clean.src";
  c.clean_tgt = dir / "clean.tgt";
  c.clean_src_emb = dir / "clean.src.emb";
  c.clean_tgt_emb = dir / "clean.tgt.emb";
  c.lid_labels_src = dir / "lid.src.tsv";
  c.lid_labels_tgt = dir / "lid.tgt.tsv";
  c.scorers = {"margin_local", "margin_global", "xent"};
  c.xent_forward = dir / "fwd.tsv";
  c.xent_backward = dir / "bwd.tsv";
  c.clean_xent_forward = dir / "clean_fwd.tsv";
  c.clean_xent_backward = dir / "clean_bwd.tsv";
  c.ensemble = true;
  c.pu.n_learners = 20;
  c.pu.seed = 17;
  c.budget_tokens = 100;
  c.out_dir = dir / "out";
  c.threads = 1;
  return out;
}

}  // namespace fixture

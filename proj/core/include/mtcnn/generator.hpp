#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtcnn/data.hpp"
#include "mtcnn/kvconfig.hpp"

namespace mtcnn {

/// A planted fraud signature. In the default mode a motif is a contiguous
/// page-ID n-gram whose events carry abnormally short dwell times. In
/// order-sensitive mode a motif is an ordered marker pair (pages[0] before
/// pages[1], planted far apart); every record contains the pair and only its
/// order carries the label signal.
struct Motif {
  std::vector<std::string> pages;
  std::vector<std::size_t> tasks;  // owning tasks, 0-based
};

struct GeneratorSpec {
  std::size_t train_records = 20000;
  std::size_t test_records = 5000;
  std::size_t tasks = 3;
  std::size_t page_vocab = 500;
  std::size_t category_vocab = 100;
  std::size_t min_len = 20;
  std::size_t max_len = 100;
  std::vector<double> fraud_rates = {0.02, 0.01, 0.004};
  std::size_t motifs_per_task = 2;
  std::size_t motif_len = 4;
  double false_motif_rate = 0.001;
  double motif_dropout = 0.0;
  /// Pairwise sharing fractions: round(corr[t][u] * motifs_per_task) motifs
  /// are owned by both tasks, and planting a shared motif labels both.
  std::vector<std::vector<double>> corr;
  double amount_mu = 4.0;     // lognormal parameters, dollars
  double amount_sigma = 1.5;
  double dwell_mu = 8.0;      // lognormal parameters, milliseconds
  double dwell_sigma = 1.2;
  double motif_dwell_mu = 4.2;
  double motif_dwell_sigma = 0.3;
  bool order_sensitive = false;

  static GeneratorSpec from_file(const std::string& path);
  static GeneratorSpec from_kv(KvConfig& kv);
  void validate() const;
};

struct SyntheticDataset {
  std::vector<EventSequence> train;
  std::vector<EventSequence> test;
  std::vector<Motif> motifs;
};

/// Deterministic under (spec, seed). Every fraudulent record for task t
/// contains at least one of task t's motifs (minus motif_dropout noise);
/// legitimate records contain motifs only at false_motif_rate.
SyntheticDataset generate_synthetic(const GeneratorSpec& spec, std::uint64_t seed);

/// True when the record matches the motif: contiguous page n-gram in the
/// default mode, ordered pair occurrence in order-sensitive mode.
bool contains_motif(const EventSequence& rec, const Motif& motif, bool order_sensitive);

/// JSON manifest with realized per-task positive counts per split plus the
/// motif definitions.
std::string manifest_json(const GeneratorSpec& spec, const SyntheticDataset& data, std::uint64_t seed);

}  // namespace mtcnn

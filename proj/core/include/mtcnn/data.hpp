#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtcnn/errors.hpp"

namespace mtcnn {

/// One page view: page id, item category, dwell time in milliseconds.
struct Event {
  std::string page;
  std::string category;
  double dwell_ms = 0.0;
};

/// One user's raw behavior sequence plus per-task labels and dollar amount.
struct EventSequence {
  std::string id;
  std::vector<Event> events;
  std::vector<int> labels;  // one binary flag per task
  double amount_usd = 0.0;
};

/// Token -> index maps for the categorical variables. Index 0 is reserved
/// for PAD / missing / rare; real tokens get dense indices starting at 1 in
/// first-appearance order. Built from the training split only.
class Vocabulary {
 public:
  Vocabulary() = default;

  int page_index(const std::string& token) const;
  int category_index(const std::string& token) const;
  std::size_t page_size() const { return pages_.size(); }      // excludes index 0
  std::size_t category_size() const { return categories_.size(); }

  void add_page(const std::string& token);      // assigns the next index
  void add_category(const std::string& token);

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  /// FNV-1a over the canonical serialization; recorded in checkpoints.
  std::uint64_t hash() const;

 private:
  std::unordered_map<std::string, int> pages_;
  std::unordered_map<std::string, int> categories_;
  std::vector<std::string> page_order_;
  std::vector<std::string> category_order_;
};

/// Fixed-length integer-coded sequences with masks, ready for embedding.
/// All row-major: ids and dwell are B*N, labels B*T, amounts B.
struct EncodedBatch {
  std::size_t batch = 0;   // B
  std::size_t length = 0;  // N
  std::size_t tasks = 0;   // T
  std::vector<std::int32_t> page_ids;
  std::vector<std::int32_t> category_ids;
  std::vector<double> dwell_norm;
  std::vector<std::uint8_t> valid_mask;
  std::vector<int> labels;
  std::vector<double> amounts;
  std::vector<std::string> record_ids;

  std::size_t rows() const { return batch; }
};

/// ln(max(t_ms, 1) / 1000); the clamp keeps the log finite at zero dwell.
double normalize_dwell(double t_ms);

Vocabulary build_vocab(const std::vector<EventSequence>& train, std::size_t min_count = 1);

/// Variable-length encoded row prior to padding.
struct EncodedRow {
  std::vector<std::int32_t> page_ids;
  std::vector<std::int32_t> category_ids;
  std::vector<double> dwell_norm;
};

/// Keeps the last N positions when longer; left-pads with index 0 /
/// dwell 0 / mask false when shorter. Mask is true exactly on kept events.
void pad_truncate(const EncodedRow& row, std::size_t n, EncodedRow& out, std::vector<std::uint8_t>& mask);

EncodedBatch encode_batch(const std::vector<EventSequence>& records, const Vocabulary& vocab,
                          std::size_t n, std::size_t tasks);

/// Copies the selected rows into a new batch (minibatch assembly).
EncodedBatch gather_rows(const EncodedBatch& batch, const std::vector<std::size_t>& rows);

/// JSON-Lines dataset I/O. One object per line:
///   {"id": str, "events": [{"p": str, "c": str, "t": ms}, ...],
///    "labels": [0|1, ...], "amount": number}
/// Unknown fields are ignored on read. Non-positive dwell is an error unless
/// clamp_dwell is set, in which case it is clamped to 1 ms.
std::vector<EventSequence> read_jsonl(const std::string& path, bool clamp_dwell = false);
void write_jsonl(const std::vector<EventSequence>& records, const std::string& path);

}  // namespace mtcnn

#include "mtcnn/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mtcnn/kvconfig.hpp"

namespace mtcnn {

using json = nlohmann::json;

int Vocabulary::page_index(const std::string& token) const {
  auto it = pages_.find(token);
  return it == pages_.end() ? 0 : it->second;
}

int Vocabulary::category_index(const std::string& token) const {
  auto it = categories_.find(token);
  return it == categories_.end() ? 0 : it->second;
}

void Vocabulary::add_page(const std::string& token) {
  if (pages_.count(token)) return;
  pages_[token] = static_cast<int>(pages_.size()) + 1;
  page_order_.push_back(token);
}

void Vocabulary::add_category(const std::string& token) {
  if (categories_.count(token)) return;
  categories_[token] = static_cast<int>(categories_.size()) + 1;
  category_order_.push_back(token);
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write vocabulary file: " + path);
  for (std::size_t i = 0; i < page_order_.size(); ++i)
    out << "page\t" << page_order_[i] << "\t" << (i + 1) << "\n";
  for (std::size_t i = 0; i < category_order_.size(); ++i)
    out << "category\t" << category_order_[i] << "\t" << (i + 1) << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open vocabulary file: " + path);
  Vocabulary v;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto parts = split(line, '\t');
    if (parts.size() != 3)
      throw FormatError(path + ":" + std::to_string(lineno) + ": expected 'variable\\ttoken\\tindex'");
    int idx = 0;
    try {
      idx = std::stoi(parts[2]);
    } catch (const std::exception&) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": bad index '" + parts[2] + "'");
    }
    if (parts[0] == "page") {
      if (idx != static_cast<int>(v.pages_.size()) + 1)
        throw FormatError(path + ":" + std::to_string(lineno) + ": non-dense page index");
      v.add_page(parts[1]);
    } else if (parts[0] == "category") {
      if (idx != static_cast<int>(v.categories_.size()) + 1)
        throw FormatError(path + ":" + std::to_string(lineno) + ": non-dense category index");
      v.add_category(parts[1]);
    } else {
      throw FormatError(path + ":" + std::to_string(lineno) + ": unknown variable '" + parts[0] + "'");
    }
  }
  return v;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0x1f;
    h *= 1099511628211ull;
  };
  for (const auto& t : page_order_) mix("p" + t);
  for (const auto& t : category_order_) mix("c" + t);
  return h;
}

double normalize_dwell(double t_ms) { return std::log(std::max(t_ms, 1.0) / 1000.0); }

Vocabulary build_vocab(const std::vector<EventSequence>& train, std::size_t min_count) {
  if (train.empty()) throw DataError("build_vocab: empty corpus");
  // counts plus first-appearance order, per variable
  std::unordered_map<std::string, std::size_t> page_count, cat_count;
  std::vector<std::string> page_order, cat_order;
  for (const auto& rec : train) {
    for (const auto& ev : rec.events) {
      if (page_count[ev.page]++ == 0) page_order.push_back(ev.page);
      if (cat_count[ev.category]++ == 0) cat_order.push_back(ev.category);
    }
  }
  Vocabulary v;
  for (const auto& t : page_order)
    if (page_count[t] >= min_count) v.add_page(t);
  for (const auto& t : cat_order)
    if (cat_count[t] >= min_count) v.add_category(t);
  return v;
}

void pad_truncate(const EncodedRow& row, std::size_t n, EncodedRow& out, std::vector<std::uint8_t>& mask) {
  if (n == 0) throw ConfigError("pad_truncate: N must be >= 1");
  const std::size_t len = row.page_ids.size();
  const std::size_t kept = std::min(len, n);
  const std::size_t skip = len - kept;  // truncation drops the oldest events
  const std::size_t pad = n - kept;

  out.page_ids.assign(n, 0);
  out.category_ids.assign(n, 0);
  out.dwell_norm.assign(n, 0.0);
  mask.assign(n, 0);
  for (std::size_t i = 0; i < kept; ++i) {
    out.page_ids[pad + i] = row.page_ids[skip + i];
    out.category_ids[pad + i] = row.category_ids[skip + i];
    out.dwell_norm[pad + i] = row.dwell_norm[skip + i];
    mask[pad + i] = 1;
  }
}

EncodedBatch encode_batch(const std::vector<EventSequence>& records, const Vocabulary& vocab,
                          std::size_t n, std::size_t tasks) {
  EncodedBatch batch;
  batch.batch = records.size();
  batch.length = n;
  batch.tasks = tasks;
  batch.page_ids.reserve(records.size() * n);
  batch.category_ids.reserve(records.size() * n);
  batch.dwell_norm.reserve(records.size() * n);
  batch.valid_mask.reserve(records.size() * n);
  batch.labels.reserve(records.size() * tasks);
  batch.amounts.reserve(records.size());
  batch.record_ids.reserve(records.size());

  EncodedRow raw, padded;
  std::vector<std::uint8_t> mask;
  for (const auto& rec : records) {
    if (rec.events.empty())
      throw DataError("encode_batch: record '" + rec.id + "' has no events");
    if (rec.labels.size() != tasks)
      throw DataError("encode_batch: record '" + rec.id + "' has " + std::to_string(rec.labels.size()) +
                      " labels, expected " + std::to_string(tasks));
    raw.page_ids.clear();
    raw.category_ids.clear();
    raw.dwell_norm.clear();
    for (const auto& ev : rec.events) {
      raw.page_ids.push_back(vocab.page_index(ev.page));
      raw.category_ids.push_back(vocab.category_index(ev.category));
      raw.dwell_norm.push_back(normalize_dwell(ev.dwell_ms));
    }
    pad_truncate(raw, n, padded, mask);
    batch.page_ids.insert(batch.page_ids.end(), padded.page_ids.begin(), padded.page_ids.end());
    batch.category_ids.insert(batch.category_ids.end(), padded.category_ids.begin(), padded.category_ids.end());
    batch.dwell_norm.insert(batch.dwell_norm.end(), padded.dwell_norm.begin(), padded.dwell_norm.end());
    batch.valid_mask.insert(batch.valid_mask.end(), mask.begin(), mask.end());
    batch.labels.insert(batch.labels.end(), rec.labels.begin(), rec.labels.end());
    batch.amounts.push_back(rec.amount_usd);
    batch.record_ids.push_back(rec.id);
  }
  return batch;
}

EncodedBatch gather_rows(const EncodedBatch& batch, const std::vector<std::size_t>& rows) {
  EncodedBatch out;
  out.batch = rows.size();
  out.length = batch.length;
  out.tasks = batch.tasks;
  const std::size_t n = batch.length, t = batch.tasks;
  out.page_ids.resize(rows.size() * n);
  out.category_ids.resize(rows.size() * n);
  out.dwell_norm.resize(rows.size() * n);
  out.valid_mask.resize(rows.size() * n);
  out.labels.resize(rows.size() * t);
  out.amounts.resize(rows.size());
  out.record_ids.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = rows[i];
    std::copy_n(batch.page_ids.begin() + r * n, n, out.page_ids.begin() + i * n);
    std::copy_n(batch.category_ids.begin() + r * n, n, out.category_ids.begin() + i * n);
    std::copy_n(batch.dwell_norm.begin() + r * n, n, out.dwell_norm.begin() + i * n);
    std::copy_n(batch.valid_mask.begin() + r * n, n, out.valid_mask.begin() + i * n);
    std::copy_n(batch.labels.begin() + r * t, t, out.labels.begin() + i * t);
    out.amounts[i] = batch.amounts[r];
    out.record_ids[i] = batch.record_ids[r];
  }
  return out;
}

std::vector<EventSequence> read_jsonl(const std::string& path, bool clamp_dwell) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open dataset file: " + path);
  std::vector<EventSequence> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": malformed JSON: " + e.what());
    }
    auto fail = [&](const std::string& what) {
      return FormatError(path + ":" + std::to_string(lineno) + ": schema error: " + what);
    };
    if (!j.is_object()) throw fail("expected an object");
    if (!j.contains("events")) throw fail("missing field 'events'");
    if (!j["events"].is_array() || j["events"].empty()) throw fail("'events' must be a nonempty array");
    if (!j.contains("labels") || !j["labels"].is_array()) throw fail("missing field 'labels'");
    if (!j.contains("amount") || !j["amount"].is_number()) throw fail("missing field 'amount'");

    EventSequence rec;
    rec.id = j.value("id", "line" + std::to_string(lineno));
    rec.amount_usd = j["amount"].get<double>();
    if (rec.amount_usd < 0) throw fail("'amount' must be nonnegative");
    for (const auto& lj : j["labels"]) {
      if (!lj.is_number_integer()) throw fail("'labels' entries must be 0 or 1");
      int l = lj.get<int>();
      if (l != 0 && l != 1) throw fail("'labels' entries must be 0 or 1");
      rec.labels.push_back(l);
    }
    for (const auto& ej : j["events"]) {
      if (!ej.is_object() || !ej.contains("p") || !ej.contains("c") || !ej.contains("t"))
        throw fail("each event needs fields 'p', 'c', 't'");
      Event ev;
      ev.page = ej["p"].get<std::string>();
      ev.category = ej["c"].get<std::string>();
      if (!ej["t"].is_number()) throw fail("event field 't' must be a number");
      ev.dwell_ms = ej["t"].get<double>();
      if (!(ev.dwell_ms > 0)) {
        if (clamp_dwell)
          ev.dwell_ms = 1.0;
        else
          throw fail("event dwell 't' must be > 0 (got " + std::to_string(ev.dwell_ms) + ")");
      }
      rec.events.push_back(std::move(ev));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_jsonl(const std::vector<EventSequence>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write dataset file: " + path);
  for (const auto& rec : records) {
    json events = json::array();
    for (const auto& ev : rec.events)
      events.push_back({{"p", ev.page}, {"c", ev.category}, {"t", ev.dwell_ms}});
    json j = {{"id", rec.id}, {"events", events}, {"labels", rec.labels}, {"amount", rec.amount_usd}};
    out << j.dump() << "\n";
  }
}

}  // namespace mtcnn

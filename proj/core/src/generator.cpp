#include "mtcnn/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <json.hpp>

namespace mtcnn {

using json = nlohmann::json;

GeneratorSpec GeneratorSpec::from_file(const std::string& path) {
  KvConfig kv = KvConfig::from_file(path);
  return from_kv(kv);
}

GeneratorSpec GeneratorSpec::from_kv(KvConfig& kv) {
  GeneratorSpec s;
  s.train_records = static_cast<std::size_t>(kv.get_int("train_records", static_cast<long long>(s.train_records)));
  s.test_records = static_cast<std::size_t>(kv.get_int("test_records", static_cast<long long>(s.test_records)));
  s.tasks = static_cast<std::size_t>(kv.get_int("tasks", static_cast<long long>(s.tasks)));
  s.page_vocab = static_cast<std::size_t>(kv.get_int("page_vocab", static_cast<long long>(s.page_vocab)));
  s.category_vocab =
      static_cast<std::size_t>(kv.get_int("category_vocab", static_cast<long long>(s.category_vocab)));
  s.min_len = static_cast<std::size_t>(kv.get_int("min_len", static_cast<long long>(s.min_len)));
  s.max_len = static_cast<std::size_t>(kv.get_int("max_len", static_cast<long long>(s.max_len)));
  s.fraud_rates = kv.get_double_list("fraud_rates", s.fraud_rates);
  s.motifs_per_task = static_cast<std::size_t>(kv.get_int("motifs_per_task", static_cast<long long>(s.motifs_per_task)));
  s.motif_len = static_cast<std::size_t>(kv.get_int("motif_len", static_cast<long long>(s.motif_len)));
  s.false_motif_rate = kv.get_double("false_motif_rate", s.false_motif_rate);
  s.motif_dropout = kv.get_double("motif_dropout", s.motif_dropout);
  s.amount_mu = kv.get_double("amount_mu", s.amount_mu);
  s.amount_sigma = kv.get_double("amount_sigma", s.amount_sigma);
  s.dwell_mu = kv.get_double("dwell_mu", s.dwell_mu);
  s.dwell_sigma = kv.get_double("dwell_sigma", s.dwell_sigma);
  s.motif_dwell_mu = kv.get_double("motif_dwell_mu", s.motif_dwell_mu);
  s.motif_dwell_sigma = kv.get_double("motif_dwell_sigma", s.motif_dwell_sigma);
  s.order_sensitive = kv.get_bool("order_sensitive", s.order_sensitive);

  const double corr_all = kv.get_double("corr", 0.0);
  s.corr.assign(s.tasks, std::vector<double>(s.tasks, corr_all));
  for (std::size_t i = 0; i < s.tasks; ++i) s.corr[i][i] = 0.0;
  for (std::size_t i = 1; i <= s.tasks; ++i)
    for (std::size_t j = i + 1; j <= s.tasks; ++j) {
      const std::string key = "corr_" + std::to_string(i) + "_" + std::to_string(j);
      if (kv.has(key)) {
        double c = kv.get_double(key, 0.0);
        s.corr[i - 1][j - 1] = c;
        s.corr[j - 1][i - 1] = c;
      }
    }
  return s;
}

void GeneratorSpec::validate() const {
  if (tasks == 0) throw ConfigError("generator: tasks must be >= 1");
  if (train_records + test_records == 0) throw ConfigError("generator: no records requested");
  if (fraud_rates.size() != tasks)
    throw ConfigError("generator: fraud_rates has " + std::to_string(fraud_rates.size()) +
                      " entries for " + std::to_string(tasks) + " tasks");
  for (double r : fraud_rates)
    if (r < 0.0 || r > 1.0) throw ConfigError("generator: fraud rate " + std::to_string(r) + " outside [0, 1]");
  if (false_motif_rate < 0.0 || false_motif_rate > 1.0)
    throw ConfigError("generator: false_motif_rate outside [0, 1]");
  if (motif_dropout < 0.0 || motif_dropout > 1.0)
    throw ConfigError("generator: motif_dropout outside [0, 1]");
  if (min_len == 0 || max_len < min_len) throw ConfigError("generator: bad length range");
  if (page_vocab == 0 || category_vocab == 0) throw ConfigError("generator: vocab sizes must be >= 1");
  if (!order_sensitive) {
    if (motif_len == 0) throw ConfigError("generator: empty motif");
    if (motifs_per_task == 0) throw ConfigError("generator: motifs_per_task must be >= 1");
    if (min_len < motif_len) throw ConfigError("generator: min_len shorter than motif_len");
    if (page_vocab < motif_len) throw ConfigError("generator: page vocab too small for distinct motif pages");
  } else {
    if (min_len < 12) throw ConfigError("generator: order-sensitive mode needs min_len >= 12");
  }
  for (const auto& row : corr)
    for (double c : row)
      if (c < 0.0 || c > 1.0) throw ConfigError("generator: correlation outside [0, 1]");
}

namespace {

std::vector<Motif> build_motifs(const GeneratorSpec& spec, std::mt19937_64& rng) {
  std::vector<Motif> motifs;
  if (spec.order_sensitive) {
    // dedicated marker tokens outside the regular page range
    for (std::size_t t = 0; t < spec.tasks; ++t) {
      Motif m;
      m.pages = {"m" + std::to_string(t) + "a", "m" + std::to_string(t) + "b"};
      m.tasks = {t};
      motifs.push_back(std::move(m));
    }
    return motifs;
  }

  std::uniform_int_distribution<std::size_t> page_dist(0, spec.page_vocab - 1);
  auto draw_pages = [&]() {
    std::set<std::size_t> chosen;
    while (chosen.size() < spec.motif_len) chosen.insert(page_dist(rng));
    // set iteration would sort them; shuffle for an arbitrary order
    std::vector<std::string> pages;
    std::vector<std::size_t> ids(chosen.begin(), chosen.end());
    std::shuffle(ids.begin(), ids.end(), rng);
    for (auto id : ids) pages.push_back("p" + std::to_string(id));
    return pages;
  };

  for (std::size_t t = 0; t < spec.tasks; ++t)
    for (std::size_t i = 0; i < spec.motifs_per_task; ++i)
      motifs.push_back(Motif{draw_pages(), {t}});
  for (std::size_t t = 0; t < spec.tasks; ++t)
    for (std::size_t u = t + 1; u < spec.tasks; ++u) {
      const std::size_t shared =
          static_cast<std::size_t>(std::llround(spec.corr[t][u] * static_cast<double>(spec.motifs_per_task)));
      for (std::size_t i = 0; i < shared; ++i) motifs.push_back(Motif{draw_pages(), {t, u}});
    }
  return motifs;
}

// Overwrites events[pos .. pos+len) with motif pages and abnormal dwells.
void plant_ngram(EventSequence& rec, const Motif& motif, std::size_t pos, const GeneratorSpec& spec,
                 std::mt19937_64& rng) {
  std::lognormal_distribution<double> dwell(spec.motif_dwell_mu, spec.motif_dwell_sigma);
  for (std::size_t i = 0; i < motif.pages.size(); ++i) {
    rec.events[pos + i].page = motif.pages[i];
    rec.events[pos + i].dwell_ms = std::max(1.0, dwell(rng));
  }
}

}  // namespace

SyntheticDataset generate_synthetic(const GeneratorSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);

  SyntheticDataset data;
  data.motifs = build_motifs(spec, rng);

  std::vector<std::vector<std::size_t>> pool(spec.tasks);  // motif indices per task
  for (std::size_t mi = 0; mi < data.motifs.size(); ++mi)
    for (std::size_t t : data.motifs[mi].tasks) pool[t].push_back(mi);

  std::uniform_int_distribution<std::size_t> len_dist(spec.min_len, spec.max_len);
  std::uniform_int_distribution<std::size_t> page_dist(0, spec.page_vocab - 1);
  std::uniform_int_distribution<std::size_t> cat_dist(0, spec.category_vocab - 1);
  std::lognormal_distribution<double> dwell_dist(spec.dwell_mu, spec.dwell_sigma);
  std::lognormal_distribution<double> amount_dist(spec.amount_mu, spec.amount_sigma);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  const std::size_t total = spec.train_records + spec.test_records;
  for (std::size_t ri = 0; ri < total; ++ri) {
    EventSequence rec;
    rec.id = "r" + std::to_string(ri);
    rec.amount_usd = amount_dist(rng);
    rec.labels.assign(spec.tasks, 0);

    const std::size_t len = len_dist(rng);
    rec.events.resize(len);
    for (auto& ev : rec.events) {
      ev.page = "p" + std::to_string(page_dist(rng));
      ev.category = "c" + std::to_string(cat_dist(rng));
      ev.dwell_ms = std::max(1.0, dwell_dist(rng));
    }

    std::vector<int> base(spec.tasks, 0);
    for (std::size_t t = 0; t < spec.tasks; ++t) base[t] = uni(rng) < spec.fraud_rates[t] ? 1 : 0;

    if (spec.order_sensitive) {
      // Each record carries every task's marker pair; the pair order is the
      // only label signal. Markers sit in the middle thirds, away from both
      // sequence edges, so no conv window can read position without PE.
      std::set<std::size_t> used;
      for (std::size_t t = 0; t < spec.tasks; ++t) {
        rec.labels[t] = base[t];
        const std::size_t a_lo = len / 6, a_hi = len / 3;
        const std::size_t b_lo = 2 * len / 3, b_hi = 5 * len / 6;
        std::uniform_int_distribution<std::size_t> early(a_lo, std::max(a_lo, a_hi - 1));
        std::uniform_int_distribution<std::size_t> late(b_lo, std::max(b_lo, b_hi - 1));
        std::size_t pa = early(rng), pb = late(rng);
        for (int attempt = 0; attempt < 32 && (used.count(pa) || used.count(pb)); ++attempt) {
          pa = early(rng);
          pb = late(rng);
        }
        used.insert(pa);
        used.insert(pb);
        const Motif& m = data.motifs[t];
        // fraud: first marker early, second late; legit: reversed
        rec.events[pa].page = base[t] ? m.pages[0] : m.pages[1];
        rec.events[pb].page = base[t] ? m.pages[1] : m.pages[0];
      }
    } else {
      std::vector<std::pair<std::size_t, std::size_t>> planted;  // [pos, pos+len)
      auto find_slot = [&](std::size_t mlen) -> std::size_t {
        std::uniform_int_distribution<std::size_t> pos_dist(0, len - mlen);
        for (int attempt = 0; attempt < 32; ++attempt) {
          std::size_t pos = pos_dist(rng);
          bool clash = false;
          for (auto [lo, hi] : planted)
            if (pos < hi && pos + mlen > lo) clash = true;
          if (!clash) return pos;
        }
        return pos_dist(rng);  // give up on overlap avoidance
      };

      bool any_fraud = false;
      for (std::size_t t = 0; t < spec.tasks; ++t) {
        if (!base[t]) continue;
        any_fraud = true;
        rec.labels[t] = 1;
        if (uni(rng) < spec.motif_dropout) continue;  // label noise: positive without motif
        const auto& candidates = pool[t];
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        const std::size_t mi = candidates[pick(rng)];
        const Motif& m = data.motifs[mi];
        const std::size_t pos = find_slot(m.pages.size());
        plant_ngram(rec, m, pos, spec, rng);
        planted.emplace_back(pos, pos + m.pages.size());
        for (std::size_t u : m.tasks) rec.labels[u] = 1;  // shared motifs correlate labels
      }
      if (!any_fraud && uni(rng) < spec.false_motif_rate) {
        std::uniform_int_distribution<std::size_t> pick(0, data.motifs.size() - 1);
        const Motif& m = data.motifs[pick(rng)];
        plant_ngram(rec, m, find_slot(m.pages.size()), spec, rng);
      }
    }

    if (ri < spec.train_records)
      data.train.push_back(std::move(rec));
    else
      data.test.push_back(std::move(rec));
  }
  return data;
}

bool contains_motif(const EventSequence& rec, const Motif& motif, bool order_sensitive) {
  if (order_sensitive) {
    for (std::size_t i = 0; i < rec.events.size(); ++i)
      if (rec.events[i].page == motif.pages[0])
        for (std::size_t j = i + 1; j < rec.events.size(); ++j)
          if (rec.events[j].page == motif.pages[1]) return true;
    return false;
  }
  const std::size_t mlen = motif.pages.size();
  if (rec.events.size() < mlen) return false;
  for (std::size_t i = 0; i + mlen <= rec.events.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < mlen && match; ++j) match = rec.events[i + j].page == motif.pages[j];
    if (match) return true;
  }
  return false;
}

std::string manifest_json(const GeneratorSpec& spec, const SyntheticDataset& data, std::uint64_t seed) {
  auto positives = [&](const std::vector<EventSequence>& recs) {
    std::vector<std::size_t> counts(spec.tasks, 0);
    for (const auto& r : recs)
      for (std::size_t t = 0; t < spec.tasks; ++t) counts[t] += static_cast<std::size_t>(r.labels[t]);
    return counts;
  };
  json motifs = json::array();
  for (const auto& m : data.motifs) motifs.push_back({{"pages", m.pages}, {"tasks", m.tasks}});
  json j = {
      {"seed", seed},
      {"tasks", spec.tasks},
      {"order_sensitive", spec.order_sensitive},
      {"train", {{"records", data.train.size()}, {"positives", positives(data.train)}}},
      {"test", {{"records", data.test.size()}, {"positives", positives(data.test)}}},
      {"motifs", motifs},
  };
  return j.dump(2);
}

}  // namespace mtcnn

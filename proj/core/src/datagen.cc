// Copyright 2026 The CLTV Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cltv/datagen.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>

#include "cltv/rng.h"
#include <nlohmann/json.hpp>

namespace cltv {

void GenConfig::Validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
  };
  require(n_customers >= 1, "n_customers", "must be >= 1");
  require(n_products >= 1, "n_products", "must be >= 1");
  require(horizon_days >= 2, "horizon_days", "must be >= 2");
  require(latent_value_spread > 0, "latent_value_spread", "must be > 0");
  require(product_popularity_exponent > 0, "product_popularity_exponent",
          "must be > 0");
  require(affinity_strength >= 0 && affinity_strength <= 1, "affinity_strength",
          "must be in [0, 1]");
  require(churn_fraction > 0 && churn_fraction < 1, "churn_fraction",
          "must be in (0, 1)");
  require(n_tiers >= 1, "n_tiers", "must be >= 1");
  require(n_tiers <= n_products, "n_tiers", "must not exceed n_products");
  require(views_per_year >= 0, "views_per_year", "must be >= 0");
  require(sessions_per_year >= 0, "sessions_per_year", "must be >= 0");
  require(orders_per_year > 0, "orders_per_year", "must be > 0");
  require(mean_item_value > 0, "mean_item_value", "must be > 0");
  require(return_rate >= 0 && return_rate <= 1, "return_rate", "must be in [0, 1]");
  require(new_collection_fraction >= 0 && new_collection_fraction <= 1,
          "new_collection_fraction", "must be in [0, 1]");
  require(n_countries >= 1, "n_countries", "must be >= 1");
  require(missing_age_fraction >= 0 && missing_age_fraction <= 1,
          "missing_age_fraction", "must be in [0, 1]");
}

namespace {

std::string PaddedId(char prefix, int64_t i, int64_t n) {
  const int width = std::max<int>(4, static_cast<int>(std::to_string(n).size()));
  std::string digits = std::to_string(i);
  return std::string(1, prefix) +
         std::string(static_cast<size_t>(width) - digits.size(), '0') + digits;
}

std::string CountryCode(int i) {
  static const char* kCodes[] = {"GB", "US", "DE", "FR", "AU", "IT", "ES", "NL"};
  if (i < 8) return kCodes[i];
  return "X" + std::to_string(i);
}

class CdfSampler {
 public:
  explicit CdfSampler(const std::vector<double>& weights) : cdf_(weights.size()) {
    double total = 0;
    for (size_t i = 0; i < weights.size(); ++i) cdf_[i] = (total += weights[i]);
    for (double& c : cdf_) c /= total;
    cdf_.back() = 1.0;
  }
  size_t Sample(Rng& rng) const {
    const double u = UniformUnit(rng);
    return static_cast<size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) -
                               cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

struct Catalogue {
  std::vector<std::string> ids;
  std::vector<bool> new_collection;
  std::vector<std::vector<size_t>> tier_products;
  std::unique_ptr<CdfSampler> global;
  std::vector<CdfSampler> per_tier;
};

Catalogue BuildCatalogue(const GenConfig& cfg, Rng& rng) {
  Catalogue cat;
  std::vector<double> weights(static_cast<size_t>(cfg.n_products));
  cat.tier_products.resize(static_cast<size_t>(cfg.n_tiers));
  for (int64_t r = 0; r < cfg.n_products; ++r) {
    cat.ids.push_back(PaddedId('p', r, cfg.n_products));
    cat.new_collection.push_back(UniformUnit(rng) < cfg.new_collection_fraction);
    weights[static_cast<size_t>(r)] =
        std::pow(static_cast<double>(r + 1), -cfg.product_popularity_exponent);
    cat.tier_products[static_cast<size_t>(r % cfg.n_tiers)].push_back(
        static_cast<size_t>(r));
  }
  cat.global = std::make_unique<CdfSampler>(weights);
  for (const auto& members : cat.tier_products) {
    std::vector<double> w;
    for (size_t p : members) w.push_back(weights[p]);
    cat.per_tier.emplace_back(w);
  }
  return cat;
}

size_t PickProduct(const Catalogue& cat, int tier, double affinity, Rng& rng) {
  if (UniformUnit(rng) < affinity) {
    const auto& members = cat.tier_products[static_cast<size_t>(tier)];
    return members[cat.per_tier[static_cast<size_t>(tier)].Sample(rng)];
  }
  return cat.global->Sample(rng);
}

double StandardNormalCdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

GeneratedData Generate(const GenConfig& cfg) {
  cfg.Validate();
  Rng catalogue_rng(MixSeed(cfg.seed, 0));
  const Catalogue cat = BuildCatalogue(cfg, catalogue_rng);

  std::vector<double> country_weights;
  for (int i = 0; i < cfg.n_countries; ++i) country_weights.push_back(1.0 / (i + 1));
  const CdfSampler countries(country_weights);

  // Final segment plays the label year under the default split.
  const int64_t final_days = std::min<int64_t>(kDaysPerYear, cfg.horizon_days / 2);
  const int64_t early_days = cfg.horizon_days - final_days;
  const Timestamp final_start = cfg.start + early_days * kSecondsPerDay;
  const Timestamp horizon_end = cfg.start + cfg.horizon_days * kSecondsPerDay;
  const double churn_offset = std::log(cfg.churn_fraction / (1 - cfg.churn_fraction));

  GeneratedData data;
  for (int64_t c = 0; c < cfg.n_customers; ++c) {
    Rng rng(MixSeed(cfg.seed, static_cast<uint64_t>(c) + 1));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double z = normal(rng);
    CustomerTruth truth;
    truth.customer_id = PaddedId('c', c, cfg.n_customers);
    truth.latent_value = std::exp(cfg.latent_value_spread * z);
    truth.tier = std::min(cfg.n_tiers - 1,
                          static_cast<int>(StandardNormalCdf(z) * cfg.n_tiers));
    const double churn_logit = churn_offset - cfg.churn_value_slope * z;
    truth.churner = UniformUnit(rng) < 1.0 / (1.0 + std::exp(-churn_logit));

    std::map<std::string, std::string> profile;
    profile["country"] = CountryCode(static_cast<int>(countries.Sample(rng)));
    if (UniformUnit(rng) >= cfg.missing_age_fraction) {
      profile["birth_year"] = std::to_string(1955 + UniformIndex(rng, 50));
    }

    const std::string& id = truth.customer_id;
    auto time_in = [&](Timestamp from, int64_t days) {
      return from + static_cast<Timestamp>(
                        UniformIndex(rng, static_cast<uint64_t>(days * kSecondsPerDay)));
    };
    auto poisson = [&](double mean) {
      if (mean <= 0) return 0;
      return std::poisson_distribution<int>(mean)(rng);
    };

    const double order_rate = cfg.orders_per_year * std::sqrt(truth.latent_value);
    const double item_scale = cfg.mean_item_value * std::sqrt(truth.latent_value);

    struct Segment {
      Timestamp from;
      int64_t days;
      bool final;
    };
    for (const Segment seg : {Segment{cfg.start, early_days, false},
                              Segment{final_start, final_days, true}}) {
      if (seg.days <= 0) continue;
      const double years = static_cast<double>(seg.days) / kDaysPerYear;
      // Lapsed customers browse less once they have gone.
      const double activity = (seg.final && truth.churner) ? 0.3 : 1.0;

      const int views = poisson(cfg.views_per_year * years * activity);
      for (int i = 0; i < views; ++i) {
        const size_t p = PickProduct(cat, truth.tier, cfg.affinity_strength, rng);
        data.events.push_back({id, time_in(seg.from, seg.days),
                               EventKind::kProductView, cat.ids[p], 0.0, {}});
      }
      const int sessions = poisson(cfg.sessions_per_year * years * activity);
      for (int i = 0; i < sessions; ++i) {
        data.events.push_back({id, time_in(seg.from, seg.days),
                               EventKind::kSessionStart, "", 0.0, profile});
      }

      int orders = poisson(order_rate * years);
      if (seg.final) orders = truth.churner ? 0 : std::max(orders, 1);
      for (int o = 0; o < orders; ++o) {
        const Timestamp t = time_in(seg.from, seg.days);
        const int items = 1 + poisson(0.5);
        for (int i = 0; i < items; ++i) {
          const size_t p = PickProduct(cat, truth.tier, cfg.affinity_strength, rng);
          std::lognormal_distribution<double> price(0.0, 0.3);
          const double value = std::round(item_scale * price(rng) * 100.0) / 100.0;
          data.events.push_back(
              {id, t, EventKind::kOrderPlaced, cat.ids[p], value,
               {{"is_new_collection", cat.new_collection[p] ? "1" : "0"}}});
          if (UniformUnit(rng) < cfg.return_rate) {
            const Timestamp rt = t + (1 + static_cast<Timestamp>(UniformIndex(rng, 30))) *
                                         kSecondsPerDay;
            if (rt < horizon_end) {
              data.events.push_back(
                  {id, rt, EventKind::kItemReturned, cat.ids[p], value, {}});
            }
          }
        }
      }
    }
    data.truth.push_back(std::move(truth));
  }
  SortEvents(data.events);
  return data;
}

std::string TruthToJson(const std::vector<CustomerTruth>& truth) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const CustomerTruth& t : truth) {
    j.push_back({{"customer_id", t.customer_id},
                 {"latent_value", t.latent_value},
                 {"tier", t.tier},
                 {"churner", t.churner}});
  }
  return j.dump(1) + "\n";
}

}  // namespace cltv

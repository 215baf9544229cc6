#include "netinf/fixtures.hpp"

namespace netinf {

const std::vector<EstimateGroup>& directional_estimates() {
  using R = EstimateRecord;
  static const std::vector<EstimateGroup> groups = {
      {"obesity (percent)",
       {R::from_percent("obesity mutual", 171.0, 59.0, 326.0),
        R::from_percent("obesity fp_names_lp", 57.0, 6.0, 123.0),
        R::from_percent("obesity lp_names_fp", 13.0, -28.0, 68.0)}},
      {"obesity (coefficient)",
       {R::from_coef("obesity mutual", 1.19, 0.33),
        R::from_coef("obesity fp_names_lp", 0.52, 0.23),
        R::from_coef("obesity lp_names_fp", 0.11, 0.28)}},
      {"peer-influence reply (coefficient)",
       {R::from_coef("peer fp_names_lp", 0.033, 0.014),
        R::from_coef("peer lp_names_fp", 0.002, 0.014)}},
      {"smoking cessation (percent)",
       {R::from_percent("smoking mutual", 43.0, 1.0, 69.0),
        R::from_percent("smoking fp_names_lp", 36.0, 12.0, 55.0),
        R::from_percent("smoking lp_names_fp", 15.0, -35.0, 50.0)}},
      {"smoking cessation (coefficient)",
       {R::from_coef("smoking mutual", 0.66, 0.33),
        R::from_coef("smoking fp_names_lp", 0.51, 0.19),
        R::from_coef("smoking lp_names_fp", 0.21, 0.27)}},
      {"happiness (percent)",
       {R::from_percent("happiness mutual", 63.0, 12.0, 148.0),
        R::from_percent("happiness fp_names_lp", 25.0, 1.0, 57.0),
        R::from_percent("happiness lp_names_fp", 12.0, -13.0, 47.0)}},
      {"happiness (coefficient)",
       {R::from_coef("happiness mutual", 2.07, 0.79),
        R::from_coef("happiness fp_names_lp", 0.70, 0.34),
        R::from_coef("happiness lp_names_fp", 0.32, 0.41)}},
      {"loneliness (coefficient)",
       {R::from_coef("loneliness mutual", 0.41, 0.13),
        R::from_coef("loneliness fp_names_lp", 0.29, 0.11),
        R::from_coef("loneliness lp_names_fp", 0.35, 0.30)}},
  };
  return groups;
}

const std::vector<std::pair<EstimateRecord, EstimateRecord>>& insignificance_comparison_pairs() {
  using R = EstimateRecord;
  static const std::vector<std::pair<EstimateRecord, EstimateRecord>> pairs = {
      {R::from_percent("obesity same-sex friend", 71.0, 13.0, 145.0),
       R::from_percent("obesity opposite-sex friend", -9.0, -62.0, 117.0)},
      {R::from_percent("obesity male same-sex friend", 100.0, 26.0, 197.0),
       R::from_percent("obesity female same-sex friend", 38.0, -39.0, 161.0)},
      {R::from_percent("smoking ego college", 57.0, 29.0, 75.0),
       R::from_percent("smoking alter no college", 4.0, -67.0, 43.0)},
      {R::from_percent("smoking alter college", 55.0, 26.0, 74.0),
       R::from_percent("smoking alter no college (2)", 4.0, -67.0, 43.0)},
      {R::from_percent("smoking both college", 61.0, 28.0, 81.0),
       R::from_percent("smoking alter no college (3)", 4.0, -67.0, 43.0)},
      {R::from_coef("smoking late period", -70.89, 35.9),
       R::from_coef("smoking early period", 11.49, 13.3)},
      {R::from_percent("happiness nearby friend", 25.0, 1.0, 57.0),
       R::from_percent("happiness distant friend", -3.0, -15.0, 10.0)},
      {R::from_percent("happiness coresident spouse", 8.0, 0.2, 16.0),
       R::from_percent("happiness non-coresident spouse", 2.0, -18.0, 31.0)},
      {R::from_percent("happiness nearby sibling", 14.0, 1.0, 28.0),
       R::from_percent("happiness distant sibling", 2.0, -3.0, 8.0)},
  };
  return pairs;
}

const std::vector<EstimateRecord>& treated_as_zero_records() {
  using R = EstimateRecord;
  static const std::vector<EstimateRecord> records = {
      R::from_percent("obesity opposite-sex sibling", 27.0, 3.0, 54.0),
      R::from_coef("smoking early current centrality", 2.20, 91.31),
      R::from_coef("smoking late current centrality", -138.00, 156.00),
      R::from_coef("happiness additional unhappy alter", -0.06, 0.03),
      R::from_coef("happiness coworkers", -0.29, 0.16),
  };
  return records;
}

}  // namespace netinf

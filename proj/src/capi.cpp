/*
 * Copyright 2026 The bsval Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "bsval/bsval.h"

#include <algorithm>
#include <exception>
#include <fstream>
#include <new>
#include <string>

#include "bsval/analysis.hpp"
#include "bsval/clustering.hpp"
#include "bsval/distribution.hpp"
#include "bsval/error.hpp"
#include "bsval/experiment.hpp"
#include "bsval/linalg.hpp"
#include "bsval/samplers.hpp"
#include "bsval/validation.hpp"

struct bsv_matrix {
  bsval::UnitaryMatrix u;
};
struct bsv_table {
  bsval::DistributionTable t;
};
struct bsv_events {
  bsval::EventSet e;
};
struct bsv_clusters {
  bsval::ClusterModel c;
};
struct bsv_report {
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

bsv_status status_of(bsval::ErrorKind kind) {
  switch (kind) {
    case bsval::ErrorKind::InvalidArgument: return BSV_ERR_INVALID_ARGUMENT;
    case bsval::ErrorKind::Config: return BSV_ERR_CONFIG;
    case bsval::ErrorKind::Numerical: return BSV_ERR_NUMERICAL;
    case bsval::ErrorKind::Io: return BSV_ERR_IO;
  }
  return BSV_ERR_INTERNAL;
}

template <class F>
bsv_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return BSV_OK;
  } catch (const bsval::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("json: ") + e.what();
    return BSV_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BSV_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BSV_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return BSV_ERR_INTERNAL;
  }
}

template <class T>
void require(const T* p, const char* name) {
  if (p == nullptr) bsval::throw_invalid(std::string(name) + " must not be NULL");
}

bsval::ProbabilityLaw to_law(const bsv_law& law) {
  switch (law.kind) {
    case BSV_LAW_IDEAL: return bsval::ProbabilityLaw::ideal();
    case BSV_LAW_PARTIAL: return bsval::ProbabilityLaw::partial(law.x_ind);
    case BSV_LAW_APPROX: return bsval::ProbabilityLaw::approx(law.x_ind, law.n_cutoff);
    case BSV_LAW_UNIFORM: return bsval::ProbabilityLaw::uniform();
    case BSV_LAW_DISTINGUISHABLE: return bsval::ProbabilityLaw::fully_distinguishable();
  }
  bsval::throw_invalid("unknown law kind");
}

bsval::Chi2Formula to_formula(bsv_chi2_formula f) {
  if (f == BSV_CHI2_STANDARD) return bsval::Chi2Formula::Standard;
  if (f == BSV_CHI2_VERBATIM) return bsval::Chi2Formula::VerbatimEq6;
  bsval::throw_invalid("unknown chi2 formula");
}

bsv_gaussian to_c(const bsval::GaussianSummary& g) { return {g.center, g.fwhm, g.center_stderr}; }

void copy_modes(const bsval::OutputPattern& p, int* modes) {
  for (std::size_t i = 0; i < p.modes().size(); ++i) modes[i] = p.modes()[i];
}

}  // namespace

extern "C" {

const char* bsv_last_error(void) { return g_last_error.c_str(); }

const char* bsv_version(void) { return "0.1.0"; }

bsv_status bsv_matrix_haar(size_t m, uint64_t seed, bsv_matrix** out) {
  return guarded([&] {
    require(out, "out");
    if (m == 0) bsval::throw_invalid("matrix dimension must be positive");
    *out = new bsv_matrix{bsval::haar_random_unitary(m, seed)};
  });
}

bsv_status bsv_matrix_from_entries(size_t m, const double* re, const double* im, bsv_matrix** out) {
  return guarded([&] {
    require(out, "out");
    require(re, "re");
    require(im, "im");
    if (m == 0) bsval::throw_invalid("matrix dimension must be positive");
    std::vector<bsval::Complex> entries(m * m);
    for (size_t i = 0; i < m * m; ++i) entries[i] = {re[i], im[i]};
    *out = new bsv_matrix{bsval::UnitaryMatrix(bsval::ComplexMatrix(m, m, std::move(entries)))};
  });
}

bsv_status bsv_matrix_load(const char* path, bsv_matrix** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new bsv_matrix{bsval::load_matrix_json(path)};
  });
}

bsv_status bsv_matrix_save(const bsv_matrix* u, const char* path) {
  return guarded([&] {
    require(u, "matrix");
    require(path, "path");
    bsval::save_matrix_json(u->u, path);
  });
}

bsv_status bsv_matrix_dim(const bsv_matrix* u, size_t* m) {
  return guarded([&] {
    require(u, "matrix");
    require(m, "m");
    *m = u->u.dim();
  });
}

bsv_status bsv_matrix_entry(const bsv_matrix* u, size_t row, size_t col, double* re, double* im) {
  return guarded([&] {
    require(u, "matrix");
    require(re, "re");
    require(im, "im");
    if (row >= u->u.dim() || col >= u->u.dim()) bsval::throw_invalid("matrix index out of range");
    *re = u->u(row, col).real();
    *im = u->u(row, col).imag();
  });
}

bsv_status bsv_matrix_unitarity_residual(const bsv_matrix* u, double* residual) {
  return guarded([&] {
    require(u, "matrix");
    require(residual, "residual");
    *residual = bsval::unitarity_residual(u->u.matrix());
  });
}

void bsv_matrix_free(bsv_matrix* u) { delete u; }

bsv_status bsv_permanent(size_t n, const double* re, const double* im, double* out_re,
                         double* out_im) {
  return guarded([&] {
    require(re, "re");
    require(im, "im");
    require(out_re, "out_re");
    require(out_im, "out_im");
    std::vector<bsval::Complex> entries(n * n);
    for (size_t i = 0; i < n * n; ++i) entries[i] = {re[i], im[i]};
    const bsval::Complex p = bsval::permanent_ryser(bsval::ComplexMatrix(n, n, std::move(entries)));
    *out_re = p.real();
    *out_im = p.imag();
  });
}

bsv_status bsv_table_build(const bsv_matrix* u, int n, bsv_law law, const int* input_modes,
                           int threads, bsv_table** out) {
  return guarded([&] {
    require(u, "matrix");
    require(out, "out");
    bsval::TableOptions options;
    if (input_modes != nullptr && n > 0) options.input_modes = std::vector<int>(input_modes, input_modes + n);
    options.threads = threads;
    *out = new bsv_table{bsval::build_distribution(u->u, n, to_law(law), options)};
  });
}

bsv_status bsv_table_size(const bsv_table* t, size_t* size) {
  return guarded([&] {
    require(t, "table");
    require(size, "size");
    *size = t->t.size();
  });
}

bsv_status bsv_table_prob(const bsv_table* t, size_t index, double* prob) {
  return guarded([&] {
    require(t, "table");
    require(prob, "prob");
    if (index >= t->t.size()) bsval::throw_invalid("table index out of range");
    *prob = t->t.probs[index];
  });
}

bsv_status bsv_table_cfs_mass(const bsv_table* t, double* mass) {
  return guarded([&] {
    require(t, "table");
    require(mass, "mass");
    *mass = t->t.cfs_mass;
  });
}

bsv_status bsv_table_pattern(const bsv_table* t, size_t index, int* modes) {
  return guarded([&] {
    require(t, "table");
    require(modes, "modes");
    if (index >= t->t.size()) bsval::throw_invalid("table index out of range");
    copy_modes(t->t.patterns[index], modes);
  });
}

bsv_status bsv_table_index_of(const bsv_table* t, const int* modes, size_t* index) {
  return guarded([&] {
    require(t, "table");
    require(modes, "modes");
    require(index, "index");
    *index = t->t.index_of(bsval::OutputPattern(std::vector<int>(modes, modes + t->t.n), t->t.m));
  });
}

bsv_status bsv_table_save(const bsv_table* t, const char* csv_path, const char* json_path,
                          uint64_t seed) {
  return guarded([&] {
    require(t, "table");
    require(csv_path, "csv_path");
    require(json_path, "json_path");
    bsval::write_table(t->t, csv_path, json_path, seed);
  });
}

void bsv_table_free(bsv_table* t) { delete t; }

bsv_status bsv_sample_exact(const bsv_table* t, size_t count, uint64_t seed, bsv_events** out) {
  return guarded([&] {
    require(t, "table");
    require(out, "out");
    *out = new bsv_events{bsval::sample_exact(t->t, count, seed)};
  });
}

bsv_status bsv_sample_mcmc(const bsv_table* t, size_t count, size_t burn_in, size_t thinning,
                           uint64_t seed, bsv_events** out) {
  return guarded([&] {
    require(t, "table");
    require(out, "out");
    *out = new bsv_events{bsval::sample_mcmc(t->t, count, bsval::McmcConfig{burn_in, thinning, seed})};
  });
}

bsv_status bsv_events_size(const bsv_events* e, size_t* size) {
  return guarded([&] {
    require(e, "events");
    require(size, "size");
    *size = e->e.size();
  });
}

bsv_status bsv_events_photons(const bsv_events* e, int* n) {
  return guarded([&] {
    require(e, "events");
    require(n, "n");
    *n = e->e.n;
  });
}

bsv_status bsv_events_pattern(const bsv_events* e, size_t index, int* modes) {
  return guarded([&] {
    require(e, "events");
    require(modes, "modes");
    if (index >= e->e.size()) bsval::throw_invalid("event index out of range");
    copy_modes(e->e.event(index), modes);
  });
}

bsv_status bsv_events_acceptance_rate(const bsv_events* e, double* rate) {
  return guarded([&] {
    require(e, "events");
    require(rate, "rate");
    *rate = e->e.acceptance_rate;
  });
}

bsv_status bsv_events_save(const bsv_events* e, const char* csv_path, const char* json_path) {
  return guarded([&] {
    require(e, "events");
    require(csv_path, "csv_path");
    require(json_path, "json_path");
    bsval::write_events(e->e, csv_path, json_path);
  });
}

void bsv_events_free(bsv_events* e) { delete e; }

bsv_status bsv_clusters_fit(const bsv_events* e, int k, uint64_t seed, int max_iter, double tol,
                            bsv_clusters** out) {
  return guarded([&] {
    require(e, "events");
    require(out, "out");
    *out = new bsv_clusters{bsval::kmeans_fit(e->e, k, seed, bsval::KMeansOptions{max_iter, tol})};
  });
}

bsv_status bsv_clusters_k(const bsv_clusters* c, int* k) {
  return guarded([&] {
    require(c, "clusters");
    require(k, "k");
    *k = c->c.k;
  });
}

bsv_status bsv_clusters_assign(const bsv_clusters* c, const int* modes, int n, int* cluster) {
  return guarded([&] {
    require(c, "clusters");
    require(modes, "modes");
    require(cluster, "cluster");
    if (n < 1) bsval::throw_invalid("n must be positive");
    *cluster = bsval::assign(c->c, bsval::OutputPattern(std::vector<int>(modes, modes + n), c->c.m));
  });
}

bsv_status bsv_clusters_member_count(const bsv_clusters* c, int cluster, size_t* count) {
  return guarded([&] {
    require(c, "clusters");
    require(count, "count");
    if (cluster < 0 || cluster >= c->c.k) bsval::throw_invalid("cluster index out of range");
    *count = c->c.member_counts[static_cast<size_t>(cluster)];
  });
}

bsv_status bsv_clusters_save(const bsv_clusters* c, const char* json_path) {
  return guarded([&] {
    require(c, "clusters");
    require(json_path, "json_path");
    std::ofstream out(json_path);
    if (!out) bsval::throw_io(std::string("cannot open ") + json_path);
    out << bsval::cluster_model_to_json(c->c).dump(2) << '\n';
    if (!out) bsval::throw_io(std::string("write failed: ") + json_path);
  });
}

void bsv_clusters_free(bsv_clusters* c) { delete c; }

bsv_status bsv_chi2(const double* first, const double* second, size_t k, bsv_chi2_formula formula,
                    double* out) {
  return guarded([&] {
    require(first, "first");
    require(second, "second");
    require(out, "out");
    *out = bsval::chi2_statistic({first, k}, {second, k}, to_formula(formula));
  });
}

bsv_status bsv_chi2_trials(const bsv_clusters* c, const bsv_events* pool, size_t events_per_trial,
                           size_t trials, uint64_t seed, bsv_chi2_formula formula, int threads,
                           double* values, bsv_gaussian* fit) {
  return guarded([&] {
    require(c, "clusters");
    require(pool, "pool");
    bsval::TrialOptions options;
    options.events_per_trial = events_per_trial;
    options.trials = trials;
    options.seed = seed;
    options.formula = to_formula(formula);
    options.threads = threads;
    const bsval::Chi2Ensemble ens = bsval::chi2_trials(c->c, pool->e, options);
    if (values != nullptr) std::copy(ens.values.begin(), ens.values.end(), values);
    if (fit != nullptr) {
      if (!ens.fitted) bsval::throw_invalid("gaussian fit needs at least 2 trials");
      *fit = to_c(ens.gaussian);
    }
  });
}

bsv_status bsv_gaussian_fit(const double* values, size_t count, bsv_gaussian_method method,
                            bsv_gaussian* out) {
  return guarded([&] {
    require(values, "values");
    require(out, "out");
    const auto m = method == BSV_GAUSS_HISTOGRAM_LSQ ? bsval::GaussianMethod::HistogramLsq
                                                     : bsval::GaussianMethod::Moments;
    *out = to_c(bsval::gaussian_fit({values, count}, m));
  });
}

bsv_status bsv_r1(double c0, double c_threshold, double c1, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = bsval::r1_metric(c0, c_threshold, c1);
  });
}

bsv_status bsv_r2(double c_threshold, double c1, double b_threshold, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = bsval::r2_metric(c_threshold, c1, b_threshold);
  });
}

bsv_status bsv_bayes_slope(const bsv_events* e, const bsv_table* ideal, double* slope) {
  return guarded([&] {
    require(e, "events");
    require(ideal, "ideal");
    require(slope, "slope");
    *slope = bsval::bayesian_lnx(e->e, ideal->t).slope;
  });
}

bsv_status bsv_tvd(const bsv_table* p, const bsv_table* q, double* out) {
  return guarded([&] {
    require(p, "p");
    require(q, "q");
    require(out, "out");
    *out = bsval::total_variation_distance(p->t, q->t);
  });
}

bsv_status bsv_shell_probability(const bsv_table* t, bsv_shell_comparator comparator,
                                 double threshold, bsv_shell* out) {
  return guarded([&] {
    require(t, "table");
    require(out, "out");
    const auto cmp = comparator == BSV_SHELL_AT_LEAST ? bsval::ShellComparator::AtLeast
                                                      : bsval::ShellComparator::AtMost;
    const bsval::ShellProbability s = bsval::shell_probability(t->t, cmp, threshold);
    *out = {s.total_prob, s.mean_prob, s.fraction_of_space, s.count};
  });
}

bsv_status bsv_run_command(const char* command, const char* config_json, const char* out_dir,
                           bsv_report** out) {
  return guarded([&] {
    require(command, "command");
    require(out_dir, "out_dir");
    nlohmann::json overrides = nlohmann::json::object();
    if (config_json != nullptr && *config_json != '\0') {
      try {
        overrides = nlohmann::json::parse(config_json);
      } catch (const nlohmann::json::parse_error& e) {
        bsval::throw_config(std::string("configuration is not valid JSON: ") + e.what());
      }
    }
    const bsval::ExperimentConfig config = bsval::resolve_config(overrides);
    const nlohmann::json summary = bsval::run_command(command, config, out_dir);
    if (out != nullptr) *out = new bsv_report{summary.dump(2)};
  });
}

const char* bsv_report_summary(const bsv_report* r) { return r ? r->summary.c_str() : ""; }

void bsv_report_free(bsv_report* r) { delete r; }

}  // extern "C"

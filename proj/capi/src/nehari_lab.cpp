#include "nehari_lab.h"

#include <cstring>
#include <string>

#include "nlab/errors.hpp"
#include "nlab/runner.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

} // namespace

struct nlab_problem {
    nlab::ProblemConfig cfg;
};

struct nlab_result {
    nlab::RunResult result;
};

extern "C" {

void nlab_run_options_init(nlab_run_options* opts) {
    if (!opts) return;
    opts->seed = 1;
    opts->deterministic = 0;
    opts->force = 0;
    opts->grid_n_override = 0;
    opts->mode_override = nullptr;
    opts->branch = nullptr;
    opts->params = nullptr;
}

nlab_status nlab_problem_from_file(const char* path, nlab_problem** out) {
    if (!path || !out) {
        set_error("null argument");
        return NLAB_INVALID_ARGUMENT;
    }
    *out = nullptr;
    try {
        auto cfg = nlab::load_config_file(path);
        *out = new nlab_problem{std::move(cfg)};
        return NLAB_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return NLAB_INVALID_ARGUMENT;
    }
}

nlab_status nlab_problem_from_text(const char* text, nlab_problem** out) {
    if (!text || !out) {
        set_error("null argument");
        return NLAB_INVALID_ARGUMENT;
    }
    *out = nullptr;
    try {
        auto cfg = nlab::parse_config_text(text);
        *out = new nlab_problem{std::move(cfg)};
        return NLAB_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return NLAB_INVALID_ARGUMENT;
    }
}

void nlab_problem_free(nlab_problem* prob) { delete prob; }

nlab_status nlab_run(const nlab_problem* prob, const char* subcommand,
                     const nlab_run_options* opts, nlab_result** out) {
    if (!prob || !subcommand || !out) {
        set_error("null argument");
        return NLAB_INVALID_ARGUMENT;
    }
    *out = nullptr;
    try {
        nlab::RunOptions ro;
        if (opts) {
            ro.seed = static_cast<unsigned long long>(opts->seed);
            ro.deterministic = opts->deterministic != 0;
            ro.force = opts->force != 0;
            ro.grid_n_override = opts->grid_n_override;
            if (opts->mode_override) ro.mode_override = opts->mode_override;
            if (opts->branch) ro.branch = opts->branch;
            if (opts->params) ro.params = nlab::parse_params(opts->params);
        }
        auto res = nlab::run_subcommand(subcommand, prob->cfg, ro);
        const int code = res.exit_code;
        *out = new nlab_result{std::move(res)};
        return code == 2 ? NLAB_VALIDATION_FAILED : NLAB_OK;
    } catch (const nlab::SpecError& e) {
        set_error(e.what());
        return NLAB_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        set_error(e.what());
        return NLAB_RUNTIME_ERROR;
    }
}

const char* nlab_result_json(const nlab_result* res) {
    return res ? res->result.json.c_str() : "";
}

int nlab_result_table_count(const nlab_result* res) {
    return res ? static_cast<int>(res->result.tables.size()) : 0;
}

const char* nlab_result_table_name(const nlab_result* res, int index) {
    if (!res || index < 0 || index >= static_cast<int>(res->result.tables.size())) return "";
    return res->result.tables[static_cast<std::size_t>(index)].first.c_str();
}

const char* nlab_result_table_csv(const nlab_result* res, int index) {
    if (!res || index < 0 || index >= static_cast<int>(res->result.tables.size())) return "";
    return res->result.tables[static_cast<std::size_t>(index)].second.c_str();
}

int nlab_result_exit_code(const nlab_result* res) {
    return res ? res->result.exit_code : 1;
}

void nlab_result_free(nlab_result* res) { delete res; }

const char* nlab_last_error(void) { return g_last_error.c_str(); }

const char* nlab_version(void) { return "0.1.0"; }

} // extern "C"

// Command-line front end; talks to the lab exclusively through the C API.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nehari_lab.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// minimal content hash for the manifest (same digest the library would print)
std::string sha256_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    // FIPS 180-4, compact
    auto rotr = [](uint32_t x, int n) { return (x >> n) | (x << (32 - n)); };
    static const uint32_t kk[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
        0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
        0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
        0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
        0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
        0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
        0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
        0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
        0xc67178f2};
    uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                     0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    std::string padded = bytes;
    const uint64_t bits = static_cast<uint64_t>(bytes.size()) * 8;
    padded += static_cast<char>(0x80);
    while (padded.size() % 64 != 56) padded += '\0';
    for (int i = 0; i < 8; ++i)
        padded += static_cast<char>((bits >> (56 - 8 * i)) & 0xff);
    for (std::size_t off = 0; off < padded.size(); off += 64) {
        const auto* p = reinterpret_cast<const unsigned char*>(padded.data() + off);
        uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (p[4 * i] << 24) | (p[4 * i + 1] << 16) | (p[4 * i + 2] << 8) | p[4 * i + 3];
        for (int i = 16; i < 64; ++i) {
            const uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        uint32_t a[8];
        for (int i = 0; i < 8; ++i) a[i] = h[i];
        for (int i = 0; i < 64; ++i) {
            const uint32_t s1 = rotr(a[4], 6) ^ rotr(a[4], 11) ^ rotr(a[4], 25);
            const uint32_t ch = (a[4] & a[5]) ^ (~a[4] & a[6]);
            const uint32_t t1 = a[7] + s1 + ch + kk[i] + w[i];
            const uint32_t s0 = rotr(a[0], 2) ^ rotr(a[0], 13) ^ rotr(a[0], 22);
            const uint32_t mj = (a[0] & a[1]) ^ (a[0] & a[2]) ^ (a[1] & a[2]);
            a[7] = a[6]; a[6] = a[5]; a[5] = a[4]; a[4] = a[3] + t1;
            a[3] = a[2]; a[2] = a[1]; a[1] = a[0]; a[0] = t1 + s0 + mj;
        }
        for (int i = 0; i < 8; ++i) h[i] += a[i];
    }
    char out[65];
    for (int i = 0; i < 8; ++i) std::snprintf(out + 8 * i, 9, "%08x", h[i]);
    return std::string(out, 64);
}

struct WrittenFile {
    std::string path;
    std::string sha256;
};

void write_text(const fs::path& p, const std::string& content, std::vector<WrittenFile>& log) {
    std::ofstream out(p, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    log.push_back({p.string(), sha256_file(p)});
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"variational lab for the mixed local-nonlocal concave-convex problem"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", branch = "both", mode_override;
    std::vector<std::string> params_list;
    long long seed = 1;
    int grid_n = 0;
    bool deterministic = false, force = false;

    const std::vector<std::string> names{"validate", "constants", "fibering", "solve",
                                         "sweep",    "talenti",   "gev"};
    for (const auto& name : names) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "problem config file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "seed for multi-start machinery");
        sub->add_option("--grid-n", grid_n, "override grid subdivisions");
        sub->add_option("--mode", mode_override, "override mode");
        sub->add_option("--branch", branch, "plus | minus | both");
        sub->add_option("--param", params_list, "extra subcommand parameter key=value");
        sub->add_flag("--deterministic", deterministic, "bit-reproducible outputs");
        sub->add_flag("--force", force, "bypass the lambda threshold refusal");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help() << std::endl;
        return 0;
    } catch (const CLI::ParseError&) {
        std::cerr << app.help() << std::endl;
        return 64;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    const auto t0 = std::chrono::steady_clock::now();

    nlab_problem* prob = nullptr;
    if (nlab_problem_from_file(config_path.c_str(), &prob) != NLAB_OK) {
        std::cerr << "error: " << nlab_last_error() << std::endl;
        return 1;
    }

    nlab_run_options opts;
    nlab_run_options_init(&opts);
    opts.seed = seed;
    opts.deterministic = deterministic ? 1 : 0;
    opts.force = force ? 1 : 0;
    opts.grid_n_override = grid_n;
    opts.mode_override = mode_override.empty() ? nullptr : mode_override.c_str();
    opts.branch = branch.c_str();
    std::string params_lines;
    for (const auto& kv : params_list) {
        params_lines += kv;
        params_lines += '\n';
    }
    opts.params = params_lines.c_str();

    nlab_result* res = nullptr;
    const nlab_status st = nlab_run(prob, sub.c_str(), &opts, &res);
    if (st == NLAB_INVALID_ARGUMENT || st == NLAB_RUNTIME_ERROR || !res) {
        std::cerr << "error: " << nlab_last_error() << std::endl;
        nlab_problem_free(prob);
        return st == NLAB_INVALID_ARGUMENT ? 2 : 1;
    }

    fs::create_directories(out_dir);
    std::vector<WrittenFile> files;
    write_text(fs::path(out_dir) / (sub + ".json"), nlab_result_json(res), files);
    for (int i = 0; i < nlab_result_table_count(res); ++i) {
        const std::string name = nlab_result_table_name(res, i);
        write_text(fs::path(out_dir) / (name + ".csv"), nlab_result_table_csv(res, i), files);
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json manifest;
    manifest["subcommand"] = sub;
    manifest["config_file"] = config_path;
    manifest["seed"] = seed;
    manifest["deterministic"] = deterministic;
    manifest["branch"] = branch;
    manifest["grid_n_override"] = grid_n;
    manifest["wall_time_s"] = deterministic ? 0.0 : wall;
    json outs = json::array();
    for (const auto& f : files) outs.push_back({{"path", f.path}, {"sha256", f.sha256}});
    manifest["outputs"] = outs;
    {
        std::ofstream mf(fs::path(out_dir) / "run_manifest.json", std::ios::binary);
        mf << manifest.dump(2) << "\n";
    }

    const int code = nlab_result_exit_code(res);
    if (sub == "validate" && code == 2)
        std::cout << nlab_result_json(res) << std::endl;

    nlab_result_free(res);
    nlab_problem_free(prob);
    return code;
}

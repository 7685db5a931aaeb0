// chronocache: operator entry points for the encrypted cache system.
//
// Subcommands: keygen, catalog-gen, run-sp, run-cs, fetch, simulate.
// Exit codes: 0 ok, 2 validation/usage, 3 revoked, 4 not found, 5 upstream.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "chronocache/client.hpp"
#include "chronocache/encoding.hpp"
#include "chronocache/http_client.hpp"
#include "chronocache/http_service.hpp"
#include "chronocache/log.hpp"
#include "chronocache/sim.hpp"

namespace {

using namespace chronocache;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRevoked = 3;
constexpr int kExitNotFound = 4;
constexpr int kExitUpstream = 5;

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::revoked:
        return kExitRevoked;
    case ErrorCode::not_found:
    case ErrorCode::no_entry:
    case ErrorCode::stale_period:
        return kExitNotFound;
    case ErrorCode::validation:
        return kExitValidation;
    default:
        return kExitUpstream;
    }
}

std::atomic<bool> g_stop{false};
void handle_signal(int) { g_stop.store(true); }

void wait_for_signal() {
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!g_stop.load())
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

std::pair<std::string, int> split_addr(const std::string& addr) {
    const auto pos = addr.rfind(':');
    if (pos == std::string::npos)
        throw std::invalid_argument("address must be host:port: " + addr);
    const int port = std::stoi(addr.substr(pos + 1));
    return {addr.substr(0, pos), port};
}

json load_json(const std::string& path) {
    const json obj = json::parse(crypto::load_file(path), nullptr, false);
    if (obj.is_discarded())
        throw std::invalid_argument("malformed JSON in " + path);
    return obj;
}

// Catalog entries without embedded bytes get deterministic filler derived
// from the content name, so a catalog file fully determines its contents.
Bytes bytes_for_name(const std::string& c_name, std::size_t size,
                     std::uint64_t seed = 0) {
    std::uint64_t h = 1469598103934665603ull; // FNV-1a
    for (const char c : c_name)
        h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
    crypto::SeededEntropy entropy(h ^ (seed * 0x9e3779b97f4a7c15ull));
    Bytes out(size);
    entropy.fill(out);
    return out;
}

void load_catalog(Provider& provider, const std::string& path) {
    const json list = load_json(path);
    if (!list.is_array())
        throw std::invalid_argument("catalog must be a JSON array");
    for (const json& item : list) {
        if (!item.is_object() || !item.contains("c_name") ||
            !item["c_name"].is_string())
            throw std::invalid_argument("catalog entry needs a c_name");
        const std::string name = item["c_name"].get<std::string>();
        if (item.contains("content_b64")) {
            const auto raw =
                enc::b64url_decode(item["content_b64"].get<std::string>());
            if (!raw)
                throw std::invalid_argument("catalog: bad content_b64 for " +
                                            name);
            provider.register_content(name, *raw);
        } else if (item.contains("size_bytes") &&
                   item["size_bytes"].is_number_unsigned()) {
            provider.register_content(
                name,
                bytes_for_name(name, item["size_bytes"].get<std::size_t>()));
        } else {
            throw std::invalid_argument(
                "catalog entry needs content_b64 or size_bytes: " + name);
        }
    }
}

crypto::NonceBits nonce_bits_of(int bits) {
    if (bits == 96)
        return crypto::NonceBits::n96;
    if (bits == 128)
        return crypto::NonceBits::n128;
    throw std::invalid_argument("nonce_bits must be 96 or 128");
}

int cmd_keygen(std::uint32_t m, const std::string& out,
               const std::string& mac_out, std::uint64_t seed, bool seeded) {
    const tree::TreeParams params(m);
    std::unique_ptr<crypto::EntropySource> entropy;
    if (seeded)
        entropy = std::make_unique<crypto::SeededEntropy>(seed);
    else
        entropy = std::make_unique<crypto::SystemEntropy>();
    const crypto::NodeKeySet keys = crypto::keygen(params, *entropy);
    const crypto::MacKey mac = crypto::gen_mac_key(*entropy);
    crypto::save_file(out, crypto::keyset_to_json(keys));
    crypto::save_file(mac_out, crypto::mac_key_to_json(mac));
    std::fprintf(stderr, "wrote %zu node keys to %s, MAC key to %s\n",
                 keys.size(), out.c_str(), mac_out.c_str());
    return kExitOk;
}

int cmd_catalog_gen(std::uint32_t count, std::uint32_t size_bytes,
                    const std::string& out, bool embed, std::uint64_t seed,
                    bool seeded) {
    // size_bytes entries derive their filler from the name alone so the
    // file stays self-contained; a custom seed therefore requires --embed
    if (seeded && !embed)
        throw std::invalid_argument("catalog-gen: --seed requires --embed");
    json list = json::array();
    for (std::uint32_t k = 0; k < count; ++k) {
        const std::string name = sim::content_name(k);
        json item{{"c_name", name}};
        if (embed)
            item["content_b64"] =
                enc::b64url_encode(bytes_for_name(name, size_bytes, seed));
        else
            item["size_bytes"] = size_bytes;
        list.push_back(std::move(item));
    }
    crypto::save_file(out, list.dump());
    std::fprintf(stderr, "wrote %u catalog entries to %s\n", count, out.c_str());
    return kExitOk;
}

int cmd_run_sp(const std::string& config_path, const std::string& listen_flag) {
    const json cfg = load_json(config_path);
    const std::uint32_t m = cfg.at("m").get<std::uint32_t>();
    const int nonce_bits = cfg.value("nonce_bits", 128);
    std::string listen = cfg.value("listen", "127.0.0.1:8080");
    if (!listen_flag.empty())
        listen = listen_flag;

    crypto::NodeKeySet keys =
        crypto::keyset_from_json(crypto::load_file(cfg.at("key_file")));
    if (keys.m() != m)
        throw std::invalid_argument("key file depth does not match config m");
    const crypto::MacKey mac =
        crypto::mac_key_from_json(crypto::load_file(cfg.at("mac_key_file")));

    Provider provider(tree::TreeParams(m), std::move(keys), mac,
                      nonce_bits_of(nonce_bits));
    if (cfg.contains("catalog_file"))
        load_catalog(provider, cfg.at("catalog_file"));

    const auto [host, port] = split_addr(listen);
    ProviderService service(provider);
    const int bound = service.start(host, port);
    std::fprintf(stderr, "provider serving %zu contents on %s:%d\n",
                 provider.content_count(), host.c_str(), bound);
    wait_for_signal();
    service.stop();
    return kExitOk;
}

int cmd_run_cs(const std::string& config_path, const std::string& listen_flag,
               const std::string& upstream_flag, std::size_t capacity_flag) {
    json cfg = json::object();
    if (!config_path.empty())
        cfg = load_json(config_path);
    std::string listen = cfg.value("listen", "127.0.0.1:8081");
    std::string upstream = cfg.value("upstream", "");
    std::size_t capacity = cfg.value("capacity_entries", std::size_t{0});
    const std::size_t capacity_bytes =
        cfg.value("capacity_bytes", std::size_t{0});
    if (!listen_flag.empty())
        listen = listen_flag;
    if (!upstream_flag.empty())
        upstream = upstream_flag;
    if (capacity_flag > 0)
        capacity = capacity_flag;
    if (upstream.empty())
        throw std::invalid_argument("cache server needs an upstream address");

    CacheServer cache({capacity, capacity_bytes});
    CacheService service(cache, upstream);
    const auto [host, port] = split_addr(listen);
    const int bound = service.start(host, port);
    std::fprintf(stderr, "cache server (capacity %zu) on %s:%d -> %s\n",
                 capacity, host.c_str(), bound, upstream.c_str());
    wait_for_signal();
    service.stop();
    return kExitOk;
}

int cmd_fetch(std::uint32_t m, const std::string& name, TimePeriod t_user,
              TimePeriod t_curr, const std::string& sp_addr,
              const std::string& cs_addr, const std::string& user_id,
              int nonce_bits, const std::string& out_path) {
    const tree::TreeParams params(m);
    // local eligibility check first: a revoked fetch must not touch the
    // network at all
    if (!tree::eligible_node(params, t_user, t_curr)) {
        std::fprintf(stderr, "REVOKED: access rights expired at period %u\n",
                     t_curr);
        return kExitRevoked;
    }

    HttpSpClient sp(sp_addr);
    HttpCsClient cs(cs_addr);
    auto keys = sp.keys(wire::KeysRequest{user_id, t_user});
    if (!keys.ok()) {
        std::fprintf(stderr, "%s: %s\n", to_string(keys.code()),
                     keys.error().message.c_str());
        return exit_code_for(keys.code());
    }
    const KeyRing ring = ring_from_keys_response(keys.value());
    if (!verify_ring(ring)) {
        std::fprintf(stderr, "VALIDATION: malformed key ring from provider\n");
        return kExitValidation;
    }

    auto content =
        request_content(ring, name, t_curr, sp, cs, nonce_bits_of(nonce_bits));
    if (!content.ok()) {
        std::fprintf(stderr, "%s: %s\n", to_string(content.code()),
                     content.error().message.c_str());
        return exit_code_for(content.code());
    }
    if (out_path.empty() || out_path == "-") {
        std::fwrite(content.value().data(), 1, content.value().size(), stdout);
    } else {
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(content.value().data()),
                  static_cast<std::streamsize>(content.value().size()));
        if (!out) {
            std::fprintf(stderr, "VALIDATION: cannot write %s\n",
                         out_path.c_str());
            return kExitValidation;
        }
    }
    return kExitOk;
}

sim::SimConfig sim_config_from_json(const json& cfg) {
    sim::SimConfig out;
    out.m = cfg.value("m", out.m);
    out.n_users = cfg.value("n_users", out.n_users);
    out.n_contents = cfg.value("n_contents", out.n_contents);
    out.requests_per_user_per_period = cfg.value(
        "requests_per_user_per_period", out.requests_per_user_per_period);
    if (cfg.contains("capacities"))
        out.capacities = cfg.at("capacities").get<std::vector<std::uint32_t>>();
    out.zipf_s = cfg.value("zipf_s", out.zipf_s);
    out.zipf_v = cfg.value("zipf_v", out.zipf_v);
    out.content_size_bytes =
        cfg.value("content_size_bytes", out.content_size_bytes);
    out.seed = cfg.value("seed", out.seed);
    const std::string mode = cfg.value("mode", "in-process");
    if (mode == "in-process") {
        out.mode = sim::Mode::in_process;
    } else if (mode == "networked") {
        out.mode = sim::Mode::networked;
    } else {
        throw std::invalid_argument("mode must be in-process or networked");
    }
    out.sp_addr = cfg.value("sp_addr", "");
    out.cs_addr = cfg.value("cs_addr", "");
    return out;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 std::uint64_t seed_override, bool seed_given) {
    sim::SimConfig config;
    if (!config_path.empty())
        config = sim_config_from_json(load_json(config_path));
    if (seed_given)
        config.seed = seed_override;
    std::fprintf(stderr, "seed: %llu\n",
                 static_cast<unsigned long long>(config.seed));

    const auto rows = sim::run_experiment(config);
    const std::string csv = sim::to_csv(rows);
    if (out_path.empty() || out_path == "-")
        std::fwrite(csv.data(), 1, csv.size(), stdout);
    else
        crypto::save_file(out_path, csv);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"end-to-end encrypted cache with time-scoped access control"};
    app.require_subcommand(1);

    auto* keygen = app.add_subcommand("keygen", "generate node and MAC keys");
    std::uint32_t kg_m = 4;
    std::string kg_out = "keys.json", kg_mac_out = "mac_key.json";
    std::uint64_t kg_seed = 0;
    keygen->add_option("--m", kg_m, "tree depth exponent (t_max = 2^m)")
        ->required();
    keygen->add_option("--out", kg_out, "node key file path");
    keygen->add_option("--mac-out", kg_mac_out, "MAC key file path");
    auto* kg_seed_opt =
        keygen->add_option("--seed", kg_seed, "deterministic keys (testing)");

    auto* catalog = app.add_subcommand("catalog-gen", "synthesize a catalog");
    std::uint32_t cg_count = 16;
    std::uint32_t cg_size = 1024;
    std::string cg_out = "catalog.json";
    bool cg_embed = false;
    std::uint64_t cg_seed = 0;
    catalog->add_option("--count", cg_count, "number of contents")->required();
    catalog->add_option("--size-bytes", cg_size, "bytes per content");
    catalog->add_option("--out", cg_out, "catalog file path");
    catalog->add_flag("--embed", cg_embed, "embed content bytes in the file");
    auto* cg_seed_opt = catalog->add_option(
        "--seed", cg_seed, "content byte seed (embedded catalogs only)");

    auto* run_sp = app.add_subcommand("run-sp", "serve the provider");
    std::string sp_config, sp_listen;
    run_sp->add_option("--config", sp_config, "provider config JSON")
        ->required();
    run_sp->add_option("--listen", sp_listen, "override listen host:port");

    auto* run_cs = app.add_subcommand("run-cs", "serve the cache server");
    std::string cs_config, cs_listen, cs_upstream;
    std::size_t cs_capacity = 0;
    run_cs->add_option("--config", cs_config, "cache config JSON");
    run_cs->add_option("--listen", cs_listen, "override listen host:port");
    run_cs->add_option("--upstream", cs_upstream, "override provider host:port");
    run_cs->add_option("--capacity", cs_capacity, "override entry capacity");

    auto* fetch = app.add_subcommand("fetch", "fetch one content as a user");
    std::uint32_t f_m = 4;
    std::string f_name, f_sp, f_cs, f_user = "cli", f_out;
    TimePeriod f_t_user = 1, f_t_curr = 1;
    int f_nonce_bits = 128;
    fetch->add_option("--m", f_m, "tree depth exponent")->required();
    fetch->add_option("--name", f_name, "content name")->required();
    fetch->add_option("--t-user", f_t_user, "user access period")->required();
    fetch->add_option("--t-curr", f_t_curr, "current period")->required();
    fetch->add_option("--sp", f_sp, "provider host:port")->required();
    fetch->add_option("--cs", f_cs, "cache server host:port")->required();
    fetch->add_option("--user-id", f_user, "identity for key bootstrap");
    fetch->add_option("--nonce-bits", f_nonce_bits, "96 or 128");
    fetch->add_option("--out", f_out, "write plaintext here instead of stdout");

    auto* simulate = app.add_subcommand("simulate", "run the workload study");
    std::string sim_config_path, sim_out;
    std::uint64_t sim_seed = 0;
    simulate->add_option("--config", sim_config_path, "simulation config JSON");
    simulate->add_option("--out", sim_out, "CSV output path (default stdout)");
    auto* sim_seed_opt =
        simulate->add_option("--seed", sim_seed, "override the config seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (keygen->parsed())
            return cmd_keygen(kg_m, kg_out, kg_mac_out, kg_seed,
                              !kg_seed_opt->empty());
        if (catalog->parsed())
            return cmd_catalog_gen(cg_count, cg_size, cg_out, cg_embed,
                                   cg_seed, !cg_seed_opt->empty());
        if (run_sp->parsed())
            return cmd_run_sp(sp_config, sp_listen);
        if (run_cs->parsed())
            return cmd_run_cs(cs_config, cs_listen, cs_upstream, cs_capacity);
        if (fetch->parsed())
            return cmd_fetch(f_m, f_name, f_t_user, f_t_curr, f_sp, f_cs,
                             f_user, f_nonce_bits, f_out);
        if (simulate->parsed())
            return cmd_simulate(sim_config_path, sim_out, sim_seed,
                                !sim_seed_opt->empty());
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "VALIDATION: %s\n", e.what());
        return kExitValidation;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "VALIDATION: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "ERROR: %s\n", e.what());
        return kExitUpstream;
    }
    return kExitValidation;
}

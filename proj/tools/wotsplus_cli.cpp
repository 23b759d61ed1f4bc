// Command-line surface: key lifecycle, signing, verification, security-level
// tables, and the reduction experiment harness.
//
// Exit codes (stable): 0 success/accept, 1 verification reject, 2 malformed
// input encoding, 3 usage/parameter/state/io error.

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wotsplus/wotsplus.hpp"

namespace {

namespace fs = std::filesystem;
using namespace wotsplus;

constexpr int kExitOk = 0;
constexpr int kExitReject = 1;
constexpr int kExitMalformed = 2;
constexpr int kExitUsage = 3;
// Distinct code for the injected-fault test path so it cannot be confused
// with a real outcome.
constexpr int kExitInjectedFault = 70;

constexpr std::uint8_t kMessageDigestTag = 0x4d;

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed on " + path.string());
  return data;
}

void write_file(const fs::path& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw IoError("write failed on " + path.string());
}

/// Documented digest step for arbitrary-length input files:
///   T = SHA-256(0x4D ‖ be32(0) ‖ data) ‖ SHA-256(0x4D ‖ be32(1) ‖ data) ‖ …
///   message = first ceil(m/8) bytes of T with bits above the m-th cleared.
/// This compression is a CLI convenience: the scheme itself signs m-bit
/// messages directly, and the analysis covers only that. Commands print a
/// note whenever the step is applied.
BitString digest_to_message(std::span<const std::uint8_t> data, std::uint32_t m_bits) {
  Bytes stream;
  std::uint32_t block = 0;
  while (stream.size() < byte_length(m_bits)) {
    Bytes input;
    input.reserve(5 + data.size());
    input.push_back(kMessageDigestTag);
    for (int i = 3; i >= 0; --i) input.push_back(static_cast<std::uint8_t>(block >> (8 * i)));
    input.insert(input.end(), data.begin(), data.end());
    const auto digest = detail::sha256(input);
    stream.insert(stream.end(), digest.begin(), digest.end());
    ++block;
  }
  stream.resize(byte_length(m_bits));
  BitString message(m_bits);
  std::copy(stream.begin(), stream.end(), message.data());
  message.mask_padding();
  return message;
}

std::string fingerprint(std::span<const std::uint8_t> blob) {
  const auto digest = detail::sha256(blob);
  static constexpr char hexdig[] = "0123456789abcdef";
  std::string out;
  for (int i = 0; i < 8; ++i) {
    out.push_back(hexdig[digest[i] >> 4]);
    out.push_back(hexdig[digest[i] & 0xf]);
  }
  return out;
}

/// Seed resolution: --seed wins, then WOTSPLUS_SEED (test mode), else the OS.
std::unique_ptr<Rng> make_rng(const std::optional<std::uint64_t>& seed_flag) {
  if (seed_flag) return std::make_unique<SeededRng>(*seed_flag);
  if (const char* env = std::getenv("WOTSPLUS_SEED")) {
    return std::make_unique<SeededRng>(std::strtoull(env, nullptr, 0));
  }
  return std::make_unique<SystemRng>();
}

fs::path marker_path(const fs::path& key_path) {
  fs::path p = key_path;
  p += ".used";
  return p;
}

/// Creates the one-time usage marker with create-exclusive semantics; fails
/// if it already exists. Returns only after the marker is durably on disk.
void create_usage_marker(const fs::path& path) {
  const int fd = ::open(path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST) throw KeyAlreadyUsed("usage marker already present: " + path.string());
    throw IoError("cannot create usage marker: " + path.string());
  }
  const char note[] = "signed\n";
  const bool ok = ::write(fd, note, sizeof(note) - 1) == sizeof(note) - 1 && ::fsync(fd) == 0;
  ::close(fd);
  if (!ok) {
    ::unlink(path.c_str());
    throw IoError("cannot persist usage marker: " + path.string());
  }
}

const std::map<std::string, std::array<std::uint32_t, 3>>& toy_presets() {
  static const std::map<std::string, std::array<std::uint32_t, 3>> presets = {
      {"toy-n8", {8, 8, 4}},
      {"toy-n10", {10, 10, 4}},
      {"toy-n12", {12, 12, 4}},
      {"toy-n16w8", {16, 16, 8}},
  };
  return presets;
}

int cmd_keygen(std::uint32_t n, std::uint32_t w, std::uint32_t m, const fs::path& out_dir,
               const std::optional<std::uint64_t>& seed) {
  const Params params = derive_params(n, m, w);
  const FamilySpec family = FamilySpec::for_bits(n);
  auto rng = make_rng(seed);

  fs::create_directories(out_dir);
  const KeyPair kp = keygen(params, family, *rng);
  const Bytes sk_blob = serialize(kp.sk);
  const Bytes pk_blob = serialize(kp.pk);
  write_file(out_dir / "sk.bin", sk_blob);
  write_file(out_dir / "pk.bin", pk_blob);

  std::cout << "wrote " << (out_dir / "sk.bin").string() << " and "
            << (out_dir / "pk.bin").string() << "\n";
  std::cout << "params: n=" << n << " m=" << m << " w=" << w << " l=" << params.l << "\n";
  std::cout << "public key fingerprint: " << fingerprint(pk_blob) << "\n";
  return kExitOk;
}

int cmd_sign(const fs::path& key_path, const fs::path& in_path, const fs::path& out_path) {
  const Bytes sk_blob = read_file(key_path);
  SecretKey sk = deserialize_secret_key(sk_blob);
  if (sk.used || fs::exists(marker_path(key_path))) {
    throw KeyAlreadyUsed("key has already signed once: " + key_path.string());
  }

  const Bytes data = read_file(in_path);
  const BitString message = digest_to_message(data, sk.params.m);
  std::cout << "note: input digested to " << sk.params.m
            << " bits before signing; the digest step sits outside the one-time "
               "signature analysis\n";

  // Fail closed: the marker must be durable before any signature bytes
  // exist. A crash between the two leaves an unusable key and no signature.
  create_usage_marker(marker_path(key_path));
  if (const char* fault = std::getenv("WOTSPLUS_FAULT")) {
    if (std::string_view(fault) == "after-marker") {
      std::cerr << "injected fault: exiting after marker write\n";
      std::exit(kExitInjectedFault);
    }
  }

  const Signature sig = sign(sk, message);
  write_file(out_path, serialize(sig));
  std::cout << "wrote " << out_path.string() << "\n";
  return kExitOk;
}

int cmd_verify(const fs::path& pub_path, const fs::path& in_path, const fs::path& sig_path) {
  const PublicKey pk = deserialize_public_key(read_file(pub_path));
  const Signature sig = deserialize_signature(read_file(sig_path));
  const BitString message = digest_to_message(read_file(in_path), pk.params.m);
  if (verify(pk, sig, message)) {
    std::cout << "accept\n";
    return kExitOk;
  }
  std::cout << "reject\n";
  return kExitReject;
}

int cmd_seclevel(std::uint32_t n, std::uint32_t w, std::uint32_t m, const std::string& attack,
                 bool compare, const std::string& format) {
  const Params params = derive_params(n, m, w);
  std::vector<Attack> attacks;
  if (attack == "classical" || attack == "both") attacks.push_back(Attack::classical);
  if (attack == "quantum" || attack == "both") attacks.push_back(Attack::quantum);
  if (attacks.empty()) throw InvalidParameter("attack must be classical, quantum or both");

  std::vector<BoundKind> kinds{BoundKind::updated};
  if (compare) kinds.insert(kinds.begin(), BoundKind::prior);

  if (format == "records") {
    using nlohmann::json;
    for (Attack a : attacks) {
      for (BoundKind k : kinds) {
        std::cout << json{{"record", "seclevel"},
                          {"attack", std::string(to_string(a))},
                          {"bound", std::string(to_string(k))},
                          {"n", n},
                          {"m", m},
                          {"w", w},
                          {"l", params.l},
                          {"level_bits", security_level(n, w, m, a, k)}}
                  << '\n';
      }
      if (compare) {
        std::cout << json{{"record", "seclevel-gap"},
                          {"attack", std::string(to_string(a))},
                          {"gap_bits", level_gap(n, w, m)}}
                  << '\n';
      }
    }
    return kExitOk;
  }

  std::cout << "security level b (bits), n=" << n << " m=" << m << " w=" << w
            << " l=" << params.l << "\n";
  for (Attack a : attacks) {
    std::cout << "  " << to_string(a) << ":";
    for (BoundKind k : kinds) {
      std::cout << "  " << to_string(k) << " b > " << security_level(n, w, m, a, k);
    }
    if (compare) std::cout << "  (gap " << level_gap(n, w, m) << " bits)";
    std::cout << "\n";
  }
  return kExitOk;
}

int cmd_harness(const std::string& preset, std::optional<std::uint32_t> n_opt,
                std::optional<std::uint32_t> m_opt, std::optional<std::uint32_t> w_opt,
                const std::string& adversary, std::uint64_t trials, std::uint64_t seed,
                unsigned threads, const std::string& mode, const std::string& format) {
  std::uint32_t n, m, w;
  if (n_opt || m_opt || w_opt) {
    if (!(n_opt && m_opt && w_opt)) {
      throw InvalidParameter("provide all of --n/--m/--w or none");
    }
    n = *n_opt;
    m = *m_opt;
    w = *w_opt;
  } else {
    const auto it = toy_presets().find(preset);
    if (it == toy_presets().end()) throw InvalidParameter("unknown preset: " + preset);
    n = it->second[0];
    m = it->second[1];
    w = it->second[2];
  }
  if (n > kToyMaxBits) throw DomainTooLarge("harness runs toy parameters only (n <= 20)");

  TrialConfig config;
  config.params = derive_params(n, m, w);
  config.family = FamilySpec::toy(n);
  config.adversary = adversary;
  config.trials = trials;
  config.seed = seed;
  config.threads = threads;

  if (mode == "hybrid") {
    const auto cells = run_hybrid_sweep(config);
    if (format == "records") {
      write_hybrid_records(std::cout, config, cells);
    } else {
      std::cout << "hybrid sweep, " << trials << " trials per cell, adversary " << adversary
                << "\n";
      for (const auto& c : cells) {
        const double ri = trials ? static_cast<double>(c.ones_image) / trials : 0;
        const double ru = trials ? static_cast<double>(c.ones_uniform) / trials : 0;
        std::cout << "  beta*=" << c.beta_star << " i*=" << c.i_star << "  rate(image)=" << ri
                  << " rate(uniform)=" << ru << "  advantage=" << std::abs(ri - ru)
                  << "  embed evals<=" << c.max_embed_evaluations << "\n";
      }
    }
    return kExitOk;
  }
  if (mode != "reduction") throw InvalidParameter("mode must be reduction or hybrid");

  const TrialStats stats = run_trials(config);
  if (format == "records") {
    write_stats_records(std::cout, config, stats);
  } else {
    std::cout << render_stats_text(config, stats);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"W-OTS+ one-time signatures with a security-reduction harness"};
  app.require_subcommand(1);

  // keygen
  auto* keygen_cmd = app.add_subcommand("keygen", "generate a one-time key pair");
  std::uint32_t kg_n = 256, kg_w = 16, kg_m = 256;
  std::string kg_out;
  std::optional<std::uint64_t> kg_seed;
  keygen_cmd->add_option("--n", kg_n, "security parameter in bits");
  keygen_cmd->add_option("--w", kg_w, "Winternitz parameter (power of two)");
  keygen_cmd->add_option("--m", kg_m, "message digest length in bits");
  keygen_cmd->add_option("--out", kg_out, "output directory")->required();
  keygen_cmd->add_option("--seed", kg_seed, "deterministic seed (test mode)");

  // sign
  auto* sign_cmd = app.add_subcommand("sign", "sign a file (one time only)");
  std::string sg_key, sg_in, sg_out;
  sign_cmd->add_option("--key", sg_key, "secret key file")->required();
  sign_cmd->add_option("--in", sg_in, "input file")->required();
  sign_cmd->add_option("--out", sg_out, "signature output file")->required();

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "verify a signature");
  std::string vf_pub, vf_in, vf_sig;
  verify_cmd->add_option("--pub", vf_pub, "public key file")->required();
  verify_cmd->add_option("--in", vf_in, "input file")->required();
  verify_cmd->add_option("--sig", vf_sig, "signature file")->required();

  // seclevel
  auto* sec_cmd = app.add_subcommand("seclevel", "security level table");
  std::uint32_t sl_n = 256, sl_w = 16, sl_m = 256;
  std::string sl_attack = "both", sl_format = "text";
  bool sl_compare = false;
  sec_cmd->add_option("--n", sl_n, "security parameter in bits");
  sec_cmd->add_option("--w", sl_w, "Winternitz parameter");
  sec_cmd->add_option("--m", sl_m, "message digest length in bits");
  sec_cmd->add_option("--attack", sl_attack, "classical | quantum | both");
  sec_cmd->add_flag("--compare", sl_compare, "show prior bound and gap as well");
  sec_cmd->add_option("--format", sl_format, "text | records");

  // harness
  auto* harness_cmd = app.add_subcommand("harness", "run reduction experiments (toy only)");
  std::string hs_preset = "toy-n8", hs_adversary = "brute-force", hs_mode = "reduction",
              hs_format = "text";
  std::optional<std::uint32_t> hs_n, hs_m, hs_w;
  std::uint64_t hs_trials = 1000, hs_seed = 1;
  unsigned hs_threads = 1;
  harness_cmd->add_option("--preset", hs_preset,
                          "toy-n8 | toy-n10 | toy-n12 | toy-n16w8");
  harness_cmd->add_option("--n", hs_n, "explicit toy n (overrides preset)");
  harness_cmd->add_option("--m", hs_m, "explicit toy m");
  harness_cmd->add_option("--w", hs_w, "explicit toy w");
  harness_cmd->add_option("--adversary", hs_adversary,
                          "give-up | replay | brute-force | collision-seeker | "
                          "digit-walker | nasty");
  harness_cmd->add_option("--trials", hs_trials, "trial count");
  harness_cmd->add_option("--seed", hs_seed, "master seed");
  harness_cmd->add_option("--threads", hs_threads, "worker threads");
  harness_cmd->add_option("--mode", hs_mode, "reduction | hybrid");
  harness_cmd->add_option("--format", hs_format, "text | records");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (keygen_cmd->parsed()) return cmd_keygen(kg_n, kg_w, kg_m, kg_out, kg_seed);
    if (sign_cmd->parsed()) return cmd_sign(sg_key, sg_in, sg_out);
    if (verify_cmd->parsed()) return cmd_verify(vf_pub, vf_in, vf_sig);
    if (sec_cmd->parsed()) {
      return cmd_seclevel(sl_n, sl_w, sl_m, sl_attack, sl_compare, sl_format);
    }
    if (harness_cmd->parsed()) {
      return cmd_harness(hs_preset, hs_n, hs_m, hs_w, hs_adversary, hs_trials, hs_seed,
                         hs_threads, hs_mode, hs_format);
    }
  } catch (const MalformedEncoding& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMalformed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

// etea: encrypt, embed, transfer, and analyze from the command line.
//
//   sender:    etea seal --key k.key --in doc.pdf --carrier clip.mp4 --out clip_out.mp4
//              etea send --host 10.0.0.2 --in clip_out.mp4
//   receiver:  etea serve --out-dir inbox
//              etea open --key k.key --in inbox/clip_out.mp4 --out doc.pdf

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "etea/etea.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  IoError          file or socket I/O failed\n"
    "  2  usage error\n"
    "  3  BadMagic         input is not a sealed payload\n"
    "  4  BadChecksum      sealed payload is corrupt\n"
    "  5  BadPadding       wrong key or tampered ciphertext\n"
    "  6  LengthMismatch   recorded length disagrees with padding\n"
    "  7  Malformed        structurally invalid sealed payload\n"
    "  8  NoMagic          no embedded payload in file\n"
    "  9  CorruptTrailer   embedded length exceeds file size\n"
    "  10 AlreadyEmbedded  carrier already holds a payload (use --force)\n"
    "  11 EmptyCarrier     carrier file is empty\n"
    "  12 ConnectFailed    could not reach the server\n"
    "  13 Rejected         server refused the file\n"
    "  14 BindFailed       server could not listen\n"
    "  15 BadKeyFile       key file is not 32 hex digits\n";

etea::Key128 load_key_file(const fs::path& path) {
  const auto raw = etea::read_file(path);
  return etea::parse_key(std::string(raw.begin(), raw.end()));
}

etea::Bytes seal_bytes(const etea::Bytes& plain, const etea::Key128& key) {
  return etea::serialize(etea::seal(plain, key));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ETEA encryption, carrier embedding and file transfer"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  std::string key_path, in_path, out_path, carrier_path, host = "127.0.0.1", bind = "0.0.0.0", out_dir = ".";
  std::string csv_path;
  std::uint16_t port = etea::net::kDefaultPort;
  std::uint64_t trials = 10'000, seed = 1;
  unsigned timeout_s = 30;
  bool force = false;

  auto* keygen = app.add_subcommand("keygen", "Write a random 128-bit key file");
  keygen->add_option("--out", out_path, "Key file to create")->required();

  auto* encrypt = app.add_subcommand("encrypt", "Encrypt a file into a sealed payload");
  auto* decrypt = app.add_subcommand("decrypt", "Decrypt a sealed payload");
  for (auto* sub : {encrypt, decrypt}) {
    sub->add_option("--key", key_path, "Key file")->required();
    sub->add_option("--in", in_path, "Input file")->required();
    sub->add_option("--out", out_path, "Output file")->required();
  }

  auto* embed = app.add_subcommand("embed", "Append a payload to a carrier file");
  embed->add_option("--carrier", carrier_path, "Carrier (video) file")->required();
  embed->add_option("--in", in_path, "Payload file")->required();
  embed->add_option("--out", out_path, "Output file")->required();
  embed->add_flag("--force", force, "Embed even if the carrier already holds a payload");

  auto* extract = app.add_subcommand("extract", "Recover an embedded payload");
  extract->add_option("--in", in_path, "Carrier file with embedded payload")->required();
  extract->add_option("--out", out_path, "Payload output file")->required();
  extract->add_option("--carrier", carrier_path, "Also write the original carrier here");

  auto* seal = app.add_subcommand("seal", "Encrypt and embed in one step");
  seal->add_option("--key", key_path, "Key file")->required();
  seal->add_option("--in", in_path, "Document to protect")->required();
  seal->add_option("--carrier", carrier_path, "Carrier (video) file")->required();
  seal->add_option("--out", out_path, "Output file")->required();
  seal->add_flag("--force", force, "Embed even if the carrier already holds a payload");

  auto* open = app.add_subcommand("open", "Extract and decrypt in one step");
  open->add_option("--key", key_path, "Key file")->required();
  open->add_option("--in", in_path, "Carrier file with embedded payload")->required();
  open->add_option("--out", out_path, "Recovered document")->required();

  auto* send = app.add_subcommand("send", "Send a file to an etea server");
  send->add_option("--host", host, "Server IPv4 address or host name")->capture_default_str();
  send->add_option("--port", port, "Server TCP port")->capture_default_str();
  send->add_option("--in", in_path, "File to send")->required();
  send->add_option("--timeout", timeout_s, "Socket timeout in seconds")->capture_default_str();

  auto* serve = app.add_subcommand("serve", "Receive files until interrupted");
  serve->add_option("--host", bind, "IPv4 address to bind")->capture_default_str();
  serve->add_option("--port", port, "TCP port (0 for ephemeral)")->capture_default_str();
  serve->add_option("--out-dir", out_dir, "Directory for received files")->capture_default_str();
  serve->add_option("--timeout", timeout_s, "Per-connection read timeout in seconds")->capture_default_str();

  auto* analyze = app.add_subcommand("analyze", "Avalanche and equivalent-key report");
  analyze->add_option("--trials", trials, "Avalanche trials")->capture_default_str()->check(CLI::PositiveNumber);
  analyze->add_option("--seed", seed, "RNG seed")->capture_default_str();
  analyze->add_option("--out", out_path, "Write the text report here instead of stdout");
  analyze->add_option("--csv", csv_path, "Also write a CSV report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*keygen) {
      const auto text = etea::render_key(etea::random_key());
      etea::write_file_atomic(out_path, etea::as_bytes(text));
      fs::permissions(out_path, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace);
    } else if (*encrypt) {
      const auto key = load_key_file(key_path);
      etea::write_file_atomic(out_path, seal_bytes(etea::read_file(in_path), key));
    } else if (*decrypt) {
      const auto key = load_key_file(key_path);
      etea::write_file_atomic(out_path, etea::open(etea::read_file(in_path), key));
    } else if (*embed) {
      etea::write_file_atomic(out_path, etea::embed(etea::read_file(carrier_path), etea::read_file(in_path), force));
    } else if (*extract) {
      auto parts = etea::extract(etea::read_file(in_path));
      etea::write_file_atomic(out_path, parts.payload);
      if (!carrier_path.empty()) etea::write_file_atomic(carrier_path, parts.carrier);
    } else if (*seal) {
      const auto key = load_key_file(key_path);
      const auto sealed = seal_bytes(etea::read_file(in_path), key);
      etea::write_file_atomic(out_path, etea::embed(etea::read_file(carrier_path), sealed, force));
    } else if (*open) {
      const auto key = load_key_file(key_path);
      const auto parts = etea::extract(etea::read_file(in_path));
      etea::write_file_atomic(out_path, etea::open(parts.payload, key));
    } else if (*send) {
      etea::net::SendOptions opts;
      opts.timeout = std::chrono::seconds(timeout_s);
      etea::net::send_file(host, port, in_path, opts);
      std::cout << "sent " << in_path << " to " << host << ':' << port << '\n';
    } else if (*serve) {
      etea::net::ServerOptions opts;
      opts.bind = bind;
      opts.port = port;
      opts.out_dir = out_dir;
      opts.read_timeout = std::chrono::seconds(timeout_s);
      etea::net::Server server(opts);
      server.start();
      std::cout << "listening on " << bind << ':' << server.port() << std::endl;
      server.run();
    } else if (*analyze) {
      const auto report = etea::analysis::avalanche(trials, seed);
      const auto eq = etea::analysis::check_equivalent_keys(100, 100, seed);

      std::ofstream file;
      if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw etea::Error(etea::ErrorCode::IoError, "cannot create " + out_path);
      }
      std::ostream& os = out_path.empty() ? std::cout : file;
      etea::analysis::write_text(os, report, seed);
      os << "equivalent_keys keys=" << eq.keys << " blocks=" << eq.blocks_per_key
         << " class_mismatches=" << eq.class_mismatches << " single_msb_flip_differs=" << eq.single_flip_differs
         << '/' << eq.keys * eq.blocks_per_key << '\n';
      if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) throw etea::Error(etea::ErrorCode::IoError, "cannot create " + csv_path);
        etea::analysis::write_csv(csv, report, seed);
      }
    }
  } catch (const etea::Error& e) {
    std::cerr << "etea: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "etea: IoError: " << e.what() << '\n';
    return static_cast<int>(etea::ErrorCode::IoError);
  }
  return 0;
}

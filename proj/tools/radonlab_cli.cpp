// Command-line front end over the C API. Parameters are key=value tokens;
// in=, out=, pgm=, recon= and ref= name files and are handled here, the rest
// go to the library unchanged.

#include "radonlab/radonlab.h"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace {

struct Failure {
  int code;
  std::string message;
};

void check(rl_status st) {
  if (st != RL_OK)
    throw Failure{static_cast<int>(st), rl_last_error()};
}

struct GridDeleter {
  void operator()(rl_grid* g) const { rl_grid_free(g); }
};
struct SinoDeleter {
  void operator()(rl_sino* s) const { rl_sino_free(s); }
};
struct StringDeleter {
  void operator()(char* s) const { rl_string_free(s); }
};
using Grid = std::unique_ptr<rl_grid, GridDeleter>;
using Sino = std::unique_ptr<rl_sino, SinoDeleter>;
using Text = std::unique_ptr<char, StringDeleter>;

// Splits file keys from library parameters.
struct Args {
  std::map<std::string, std::string> files;
  std::vector<std::string> params;

  Args(const std::vector<std::string>& tokens, std::initializer_list<const char*> file_keys) {
    for (const auto& t : tokens) {
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw Failure{2, "expected key=value, got '" + t + "'"};
      const std::string key = t.substr(0, eq);
      bool is_file = false;
      for (const char* k : file_keys)
        is_file = is_file || key == k;
      if (is_file)
        files[key] = t.substr(eq + 1);
      else
        params.push_back(t);
    }
  }

  std::vector<const char*> kv() const {
    std::vector<const char*> out;
    for (const auto& p : params)
      out.push_back(p.c_str());
    return out;
  }

  bool has(const std::string& k) const { return files.count(k) != 0; }

  const std::string& file(const std::string& k) const {
    const auto it = files.find(k);
    if (it == files.end())
      throw Failure{2, "missing " + k + "=<path>"};
    return it->second;
  }
};

Grid read_grid(const std::string& path) {
  rl_grid* g = nullptr;
  check(rl_grid_read(path.c_str(), &g));
  return Grid(g);
}

Sino read_sino(const std::string& path) {
  rl_sino* s = nullptr;
  check(rl_sino_read(path.c_str(), &s));
  return Sino(s);
}

void write_grid_outputs(const Args& a, const rl_grid* g) {
  check(rl_grid_write(g, a.file("out").c_str()));
  if (a.has("pgm"))
    check(rl_grid_write_pgm(g, a.file("pgm").c_str(), 0.0, 0.0));
}

void emit(const Args& a, const char* text, bool quiet) {
  if (a.has("out")) {
    std::ofstream f(a.file("out"), std::ios::binary);
    if (!f || !(f << text))
      throw Failure{3, "cannot write '" + a.file("out") + "'"};
  } else if (!quiet) {
    std::fputs(text, stdout);
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel-beam Radon transform lab: phantoms, sinograms, FBP, aliasing analysis"};
  app.require_subcommand(1);
  int threads = 1;
  bool quiet = false;
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "suppress reports on stdout");

  std::vector<std::string> tokens;
  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("params", tokens, "key=value parameters");
    return sub;
  };
  auto* phantom = add("phantom", "render a phantom: kind=... n=... L=... out=F.grid [pgm=F.pgm]");
  auto* sinogram = add("sinogram", "sinogram of a phantom (phantom keys) or of in=F.grid: m= pcount= R= out=F.sino");
  auto* filter = add("filter", "ramp-filter a sinogram: in=F.sino out=G.sino [mode=linear|periodic]");
  auto* recon = add("recon", "reconstruct: in=F.sino method=direct|interp, or in=F.grid method=multiplier; out=F.grid");
  auto* predict = add("predict", "predicted artifact table: phantom keys, m=, window=, B=, kmax= [out=F.csv]");
  auto* verify = add("verify", "match artifact peaks: recon=F.grid ref=G.grid phantom keys, m= ... [out=F.txt]");
  auto* fit = add("fit", "fit a singularity model on a crosscut: in=F.grid kind=pv|inv_sqrt|log pos= p0= ...");
  auto* crosscut = add("crosscut", "crosscut CSV: in=F.grid axis=row|column|line pos= [out=F.csv]");

  std::vector<std::string> compare_files;
  auto* compare = app.add_subcommand("compare", "relative l2 and max errors of a.grid against b.grid");
  compare->add_option("files", compare_files, "a.grid b.grid")->expected(2)->required();

  std::string config;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "run an experiment config and print its pass/fail summary");
  run->add_option("config", config, "config file")->required();
  run->add_option("--out", out_dir, "output directory (default: output.dir from the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  try {
    check(rl_set_threads(threads));
    if (phantom->parsed()) {
      const Args a(tokens, {"out", "pgm"});
      const auto kv = a.kv();
      rl_grid* g = nullptr;
      check(rl_phantom(kv.data(), static_cast<int>(kv.size()), &g));
      const Grid owned(g);
      write_grid_outputs(a, g);
    } else if (sinogram->parsed()) {
      const Args a(tokens, {"in", "out"});
      const auto kv = a.kv();
      rl_sino* s = nullptr;
      if (a.has("in")) {
        const Grid img = read_grid(a.file("in"));
        check(rl_sinogram_grid(img.get(), kv.data(), static_cast<int>(kv.size()), &s));
      } else {
        check(rl_sinogram_phantom(kv.data(), static_cast<int>(kv.size()), &s));
      }
      const Sino owned(s);
      check(rl_sino_write(s, a.file("out").c_str()));
    } else if (filter->parsed()) {
      const Args a(tokens, {"in", "out"});
      const auto kv = a.kv();
      const Sino in = read_sino(a.file("in"));
      rl_sino* s = nullptr;
      check(rl_filter(in.get(), kv.data(), static_cast<int>(kv.size()), &s));
      const Sino owned(s);
      check(rl_sino_write(s, a.file("out").c_str()));
    } else if (recon->parsed()) {
      Args a(tokens, {"in", "out", "pgm"});
      bool multiplier = false;
      for (auto it = a.params.begin(); it != a.params.end(); ++it)
        if (*it == "method=multiplier") {
          multiplier = true;
          a.params.erase(it);
          break;
        }
      const auto kv = a.kv();
      rl_grid* g = nullptr;
      if (multiplier) {
        const Grid f = read_grid(a.file("in"));
        check(rl_recon_multiplier(f.get(), kv.data(), static_cast<int>(kv.size()), &g));
      } else {
        const Sino s = read_sino(a.file("in"));
        check(rl_recon(s.get(), kv.data(), static_cast<int>(kv.size()), &g));
      }
      const Grid owned(g);
      write_grid_outputs(a, g);
    } else if (predict->parsed()) {
      const Args a(tokens, {"out"});
      const auto kv = a.kv();
      char* t = nullptr;
      check(rl_predict(kv.data(), static_cast<int>(kv.size()), &t));
      const Text owned(t);
      emit(a, t, quiet);
    } else if (verify->parsed()) {
      const Args a(tokens, {"recon", "ref", "out"});
      const auto kv = a.kv();
      const Grid r = read_grid(a.file("recon"));
      const Grid ref = read_grid(a.file("ref"));
      char* t = nullptr;
      int all = 0;
      check(rl_verify(r.get(), ref.get(), kv.data(), static_cast<int>(kv.size()), &t, &all));
      const Text owned(t);
      emit(a, t, quiet);
    } else if (fit->parsed()) {
      const Args a(tokens, {"in", "out"});
      const auto kv = a.kv();
      const Grid g = read_grid(a.file("in"));
      char* t = nullptr;
      int accepted = 0;
      check(rl_fit(g.get(), kv.data(), static_cast<int>(kv.size()), &t, &accepted));
      const Text owned(t);
      emit(a, t, quiet);
      if (!accepted) {
        const std::string text = t;
        const auto pos = text.find("# rejected: ");
        throw Failure{4, pos == std::string::npos ? "fit rejected"
                                                  : "fit rejected: " + text.substr(pos + 12, text.find('\n', pos) - pos - 12)};
      }
    } else if (crosscut->parsed()) {
      const Args a(tokens, {"in", "out"});
      const auto kv = a.kv();
      const Grid g = read_grid(a.file("in"));
      char* t = nullptr;
      check(rl_crosscut(g.get(), kv.data(), static_cast<int>(kv.size()), &t));
      const Text owned(t);
      emit(a, t, quiet);
    } else if (compare->parsed()) {
      const Grid a = read_grid(compare_files[0]);
      const Grid b = read_grid(compare_files[1]);
      double l2 = 0.0, linf = 0.0;
      check(rl_compare(a.get(), b.get(), &l2, &linf));
      if (!quiet)
        std::printf("l2_rel=%.10g linf_rel=%.10g\n", l2, linf);
    } else if (run->parsed()) {
      char* t = nullptr;
      int all = 0;
      check(rl_run_config(config.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(), &t, &all));
      const Text owned(t);
      if (!quiet)
        std::fputs(t, stdout);
      return all ? 0 : 1;
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return f.code;
  }
  return 0;
}

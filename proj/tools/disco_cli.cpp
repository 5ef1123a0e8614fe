// Command-line front end; links only the public C API (disco.h).
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "disco.h"

namespace {

int usage() {
  std::fprintf(stderr,
               "usage:\n"
               "  disco run <config> [out_dir]   run an experiment config\n"
               "  disco summarize <dir>          rebuild the summary table\n"
               "  disco plot <dir> [out.svg]     render gap-vs-rounds curves\n");
  return 2;
}

int fail(disco_status st) {
  std::fprintf(stderr, "error: %s\n", disco_last_error());
  return st == DISCO_ERR_INVALID_ARG ? 2 : 1;
}

int cmd_run(int argc, char** argv) {
  if (argc < 1) return usage();
  const char* config = argv[0];
  const char* out_dir = argc > 1 ? argv[1] : "out";
  const disco_status st = disco_run_experiment(config, out_dir);
  if (st != DISCO_OK) return fail(st);
  std::printf("wrote traces and summary.md to %s\n", out_dir);
  return 0;
}

int cmd_summarize(int argc, char** argv) {
  if (argc < 1) return usage();
  std::vector<char> buf(1 << 20);
  const disco_status st = disco_summarize(argv[0], buf.data(), buf.size());
  if (st != DISCO_OK) return fail(st);
  std::fputs(buf.data(), stdout);
  return 0;
}

int cmd_plot(int argc, char** argv) {
  if (argc < 1) return usage();
  const disco_status st = disco_plot(argv[0], argc > 1 ? argv[1] : nullptr);
  if (st != DISCO_OK) return fail(st);
  std::printf("wrote %s\n", argc > 1 ? argv[1] : "plot.svg");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) return usage();
  if (std::strcmp(argv[1], "run") == 0) return cmd_run(argc - 2, argv + 2);
  if (std::strcmp(argv[1], "summarize") == 0)
    return cmd_summarize(argc - 2, argv + 2);
  if (std::strcmp(argv[1], "plot") == 0) return cmd_plot(argc - 2, argv + 2);
  return usage();
}

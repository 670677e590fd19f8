#include <iostream>

#include "commands.hpp"
#include "common.hpp"

int main(int argc, char **argv)
{
  CLI::App app{"GIRAF structured low-rank k-space recovery"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GIRAF_VERSION);
  giraf::cli::add_phantom_command(app);
  giraf::cli::add_mask_command(app);
  giraf::cli::add_recover_command(app);
  giraf::cli::add_bench_command(app);
  giraf::cli::add_validate_command(app);
  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const &e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (giraf::cli::InvariantFailure const &e) {
    std::cerr << "invariant failed: " << e.what() << '\n';
    return 1;
  } catch (std::invalid_argument const &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (std::exception const &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

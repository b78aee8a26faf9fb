// Command-line front end: scripted runs, the protocol server and file
// utilities. Every subcommand exits nonzero on any error.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <pthread.h>

#include "molecuforge/error.hpp"
#include "molecuforge/persistence.hpp"
#include "molecuforge/relaxation.hpp"
#include "molecuforge/script.hpp"
#include "molecuforge/server.hpp"

namespace mf = molecuforge;

namespace {

void emit(const std::string& bytes, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << bytes;
    } else {
        mf::write_file(out_path, bytes);
    }
}

int cmd_run(const std::string& script, const std::string& snapshot_path, bool as_json) {
    const mf::ScriptReport report = mf::run_script(script);
    if (as_json) {
        std::cout << mf::to_json(report).dump(2) << '\n';
    } else {
        for (const auto& l : report.lines) {
            std::cout << "line " << l.line << ": " << l.cmd << " ";
            switch (l.status) {
                case mf::LineStatus::ok: std::cout << "ok"; break;
                case mf::LineStatus::expected_error: std::cout << "expected " << l.error_code; break;
                case mf::LineStatus::failed:
                    std::cout << "FAILED" << (l.error_code.empty() ? "" : " " + l.error_code) << ": " << l.message;
                    break;
            }
            std::cout << '\n';
        }
        for (const auto& v : report.violations) std::cout << "violation: " << v.entity << ": " << v.rule << '\n';
        std::cout << (report.success ? "success" : "failure") << '\n';
    }
    if (!snapshot_path.empty() && !report.final_snapshot.empty()) mf::write_file(snapshot_path, report.final_snapshot);
    return report.success ? 0 : 1;
}

int cmd_serve(const std::string& address, bool stdio, const std::string& ui_root) {
    if (stdio) {
        mf::serve_stream(std::cin, std::cout);
        return 0;
    }
    // Block termination signals in every thread; the main thread waits for them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    mf::Server::Options options;
    options.address = address.empty() ? mf::default_address() : address;
    if (!ui_root.empty()) options.ui_root = ui_root;
    mf::Server server(options);
    server.start();
    std::cerr << "molecuforge: serving on " << options.address;
    if (server.port() != 0) std::cerr << " (port " << server.port() << ")";
    std::cerr << std::endl;

    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
    return 0;
}

int cmd_validate(const std::string& path) {
    const mf::Workspace ws = mf::load_xml(mf::read_file(path));
    std::cout << path << ": valid (" << ws.atoms.size() << " atoms, " << ws.bonds.size() << " bonds)\n";
    return 0;
}

int cmd_relax(const std::string& path, const std::vector<mf::AtomId>& fixed, const std::string& out_path) {
    mf::Workspace ws = mf::load_xml(mf::read_file(path));
    const mf::RelaxReport r = mf::relax(ws, mf::ForceFieldParams{}, {fixed.begin(), fixed.end()});
    std::cerr << "relax: " << r.iterations << " iterations, energy " << r.initial_energy << " -> " << r.final_energy
              << ", gradient norm " << r.final_gradient_norm << (r.converged ? ", converged" : ", NOT converged")
              << '\n';
    emit(mf::save_xml(ws), out_path);
    return r.converged ? 0 : 1;
}

int cmd_convert(const std::string& path, const std::string& to, const std::string& out_path) {
    const mf::Workspace ws = mf::load_xml(mf::read_file(path));
    emit(to == "xyz" ? mf::export_xyz(ws) : mf::save_xml(ws), out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"molecuforge: valency-constrained ball-and-stick molecule engine"};
    app.require_subcommand(1);

    std::string out_path;
    auto* new_cmd = app.add_subcommand("new", "Write an empty workspace document");
    new_cmd->add_option("-o,--out", out_path, "Output file (default: stdout)");

    std::string script, snapshot_path;
    bool as_json = false;
    auto* run_cmd = app.add_subcommand("run", "Execute a command script");
    run_cmd->add_option("script", script, "Script file, one request per line")->required();
    run_cmd->add_option("--snapshot", snapshot_path, "Write the final workspace XML here");
    run_cmd->add_flag("--json", as_json, "Print the report as JSON");

    std::string address, ui_root;
    bool stdio = false;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the command protocol");
    serve_cmd->add_option("address", address, "host:port or unix:<path> (default: $MOLECUFORGE_ADDR or 127.0.0.1:7878)");
    serve_cmd->add_flag("--stdio", stdio, "Serve one session over stdin/stdout");
    serve_cmd->add_option("--ui", ui_root, "Directory of static browser UI assets")->check(CLI::ExistingDirectory);

    std::string file;
    auto* validate_cmd = app.add_subcommand("validate", "Check a workspace document");
    validate_cmd->add_option("file", file, "XML document")->required();

    std::vector<mf::AtomId> fixed;
    auto* relax_cmd = app.add_subcommand("relax", "Relax a workspace document");
    relax_cmd->add_option("file", file, "XML document")->required();
    relax_cmd->add_option("--fixed", fixed, "Atom ids held in place");
    relax_cmd->add_option("-o,--out", out_path, "Output file (default: stdout)");

    std::string to;
    auto* convert_cmd = app.add_subcommand("convert", "Convert a workspace document");
    convert_cmd->add_option("file", file, "XML document")->required();
    convert_cmd->add_option("--to", to, "Target format")->required()->check(CLI::IsMember({"xyz", "xml"}));
    convert_cmd->add_option("-o,--out", out_path, "Output file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*new_cmd) {
            emit(mf::save_xml(mf::Workspace{}), out_path);
            return 0;
        }
        if (*run_cmd) return cmd_run(script, snapshot_path, as_json);
        if (*serve_cmd) return cmd_serve(address, stdio, ui_root);
        if (*validate_cmd) return cmd_validate(file);
        if (*relax_cmd) return cmd_relax(file, fixed, out_path);
        if (*convert_cmd) return cmd_convert(file, to, out_path);
    } catch (const mf::Error& e) {
        std::cerr << "error: " << mf::error_code_name(e.code()) << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "../support/fixtures.hpp"
#include "molecuforge/error.hpp"
#include "molecuforge/persistence.hpp"

namespace mf = molecuforge;

namespace {

mf::ErrorCode load_error(const std::string& doc) {
    try {
        mf::load_xml(doc);
    } catch (const mf::Error& e) {
        return e.code();
    }
    FAIL("document loaded without error");
    return mf::ErrorCode::IoError;
}

std::string wrap(const std::string& atoms, const std::string& bonds) {
    return "<molecusense version=\"1\"><atoms>" + atoms + "</atoms><bonds>" + bonds + "</bonds></molecusense>";
}

const std::string kAtom1 = R"(<atom id="1" element="C" x="0" y="0" z="0" qw="1" qx="0" qy="0" qz="0"/>)";
const std::string kAtom2 = R"(<atom id="2" element="C" x="1.54" y="0" z="0" qw="1" qx="0" qy="0" qz="0"/>)";

}  // namespace

TEST_CASE("save examples") {
    mf::Workspace ws;
    CHECK(mf::save_xml(ws) == "<molecusense version=\"1\">\n  <atoms>\n  </atoms>\n  <bonds>\n  </bonds>\n</molecusense>\n");

    mf::create_atom(ws, "C", mf::Vec3::Zero());
    const std::string doc = mf::save_xml(ws);
    CHECK(doc.find(R"(<atom id="1" element="C" x="0" y="0" z="0" qw="1" qx="0" qy="0" qz="0"/>)") != std::string::npos);

    ws.atom(1).position.x() = std::nan("");
    CHECK_THROWS_AS(mf::save_xml(ws), mf::Error);
}

TEST_CASE("round trip over random workspaces") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const mf::Workspace ws = fixtures::random_workspace(rng, 20);
        const std::string first = mf::save_xml(ws);
        const mf::Workspace back = mf::load_xml(first);
        CHECK(mf::save_xml(back) == first);
        CHECK(mf::validate(back).empty());
        REQUIRE(back.atoms.size() == ws.atoms.size());
        REQUIRE(back.bonds.size() == ws.bonds.size());
        for (const auto& [id, a] : ws.atoms) {
            const auto& b = back.atom(id);
            CHECK(b.element->symbol == a.element->symbol);
            CHECK((b.position - a.position).norm() < 1e-6);
            CHECK(std::abs(std::abs(b.orientation.dot(a.orientation)) - 1.0) < 1e-6);
            for (std::size_t s = 0; s < a.slots.size(); ++s) CHECK(b.slots[s].occupied_by == a.slots[s].occupied_by);
        }
        for (const auto& [id, bond] : ws.bonds) {
            CHECK(back.bond(id).ends == bond.ends);
            CHECK(std::abs(back.bond(id).rest_length - bond.rest_length) < 1e-9);
        }
        CHECK(back.next_atom_id > (ws.atoms.empty() ? 0 : ws.atoms.rbegin()->first));
        CHECK_FALSE(back.anchor);
        CHECK_FALSE(back.grab);
    }
}

TEST_CASE("output depends only on ids and values") {
    mf::Workspace a, b;
    mf::create_atom(a, "C", mf::Vec3(0, 0, 0));
    mf::create_atom(a, "O", mf::Vec3(1, 2, 3));
    mf::create_atom(b, "C", mf::Vec3(0, 0, 0));
    mf::create_atom(b, "O", mf::Vec3(1, 2, 3));
    // Same content, different map construction history.
    mf::Workspace c;
    c.next_atom_id = b.next_atom_id;
    c.atoms.emplace(2, b.atom(2));
    c.atoms.emplace(1, b.atom(1));
    CHECK(mf::save_xml(a) == mf::save_xml(b));
    CHECK(mf::save_xml(a) == mf::save_xml(c));
}

TEST_CASE("anchor and grab are not persisted") {
    mf::Workspace ws;
    const auto m = fixtures::build_methane(ws);
    mf::set_anchor(ws, m[0]);
    const std::string with_anchor = mf::save_xml(ws);
    mf::set_anchor(ws, std::nullopt);
    CHECK(mf::save_xml(ws) == with_anchor);
}

TEST_CASE("load faults") {
    SUBCASE("valid minimal documents") {
        CHECK(mf::load_xml(wrap("", "")).atoms.empty());
        const auto ws = mf::load_xml(wrap(kAtom1 + kAtom2, R"(<bond id="1" a="1" slotA="0" b="2" slotB="1" rest="1.54"/>)"));
        CHECK(ws.bonds.size() == 1);
        CHECK(ws.next_atom_id == 3);
        CHECK(ws.next_bond_id == 2);
    }
    SUBCASE("dangling bond") {
        CHECK(load_error(wrap(kAtom1, R"(<bond id="1" a="1" slotA="0" b="7" slotB="0" rest="1.54"/>)")) ==
              mf::ErrorCode::ConsistencyError);
    }
    SUBCASE("slot out of range or reused") {
        CHECK(load_error(wrap(kAtom1 + kAtom2, R"(<bond id="1" a="1" slotA="4" b="2" slotB="0" rest="1.54"/>)")) ==
              mf::ErrorCode::ConsistencyError);
        CHECK(load_error(wrap(kAtom1 + kAtom2 + R"(<atom id="3" element="H" x="3" y="0" z="0" qw="1" qx="0" qy="0" qz="0"/>)",
                              R"(<bond id="1" a="1" slotA="0" b="2" slotB="0" rest="1.54"/>)"
                              R"(<bond id="2" a="1" slotA="0" b="3" slotB="0" rest="1.09"/>)")) ==
              mf::ErrorCode::ConsistencyError);
    }
    SUBCASE("duplicate pair, self loop, bad rest") {
        CHECK(load_error(wrap(kAtom1 + kAtom2, R"(<bond id="1" a="1" slotA="0" b="2" slotB="0" rest="1.54"/>)"
                                               R"(<bond id="2" a="2" slotA="1" b="1" slotB="1" rest="1.54"/>)")) ==
              mf::ErrorCode::ConsistencyError);
        CHECK(load_error(wrap(kAtom1, R"(<bond id="1" a="1" slotA="0" b="1" slotB="1" rest="1.54"/>)")) ==
              mf::ErrorCode::ConsistencyError);
        CHECK(load_error(wrap(kAtom1 + kAtom2, R"(<bond id="1" a="1" slotA="0" b="2" slotB="0" rest="-1"/>)")) ==
              mf::ErrorCode::ConsistencyError);
    }
    SUBCASE("duplicate atom id") {
        CHECK(load_error(wrap(kAtom1 + kAtom1, "")) == mf::ErrorCode::ConsistencyError);
    }
    SUBCASE("bad quaternion") {
        CHECK(load_error(wrap(R"(<atom id="1" element="C" x="0" y="0" z="0" qw="2" qx="0" qy="0" qz="0"/>)", "")) ==
              mf::ErrorCode::ConsistencyError);
    }
    SUBCASE("malformed XML") {
        CHECK(load_error("<molecusense version=\"1\"><atoms>") == mf::ErrorCode::ParseError);
        CHECK(load_error("not xml at all <") == mf::ErrorCode::ParseError);
    }
    SUBCASE("schema") {
        CHECK(load_error("<molecusense version=\"2\"><atoms/><bonds/></molecusense>") == mf::ErrorCode::SchemaError);
        CHECK(load_error("<other version=\"1\"><atoms/><bonds/></other>") == mf::ErrorCode::SchemaError);
        CHECK(load_error("<molecusense version=\"1\"><atoms/></molecusense>") == mf::ErrorCode::SchemaError);
        CHECK(load_error(wrap(R"(<atom id="1" element="C" x="0" y="0" z="0" qw="1" qx="0" qy="0"/>)", "")) ==
              mf::ErrorCode::SchemaError);
        CHECK(load_error(wrap(R"(<atom id="1" element="C" x="0" y="0" z="0" qw="1" qx="0" qy="0" qz="0" color="red"/>)", "")) ==
              mf::ErrorCode::SchemaError);
        CHECK(load_error(wrap(R"(<atom id="1" element="C" x="zero" y="0" z="0" qw="1" qx="0" qy="0" qz="0"/>)", "")) ==
              mf::ErrorCode::SchemaError);
        CHECK(load_error(wrap(R"(<molecule/>)", "")) == mf::ErrorCode::SchemaError);
    }
    SUBCASE("unknown element symbol") {
        CHECK_THROWS_AS(mf::load_xml(wrap(R"(<atom id="1" element="Xe" x="0" y="0" z="0" qw="1" qx="0" qy="0" qz="0"/>)", "")),
                        mf::Error);
    }
}

TEST_CASE("xyz export") {
    mf::Workspace ws;
    CHECK(mf::export_xyz(ws) == "0\nmolecusense export\n");
    mf::create_atom(ws, "C", mf::Vec3(0, 0, 0));
    mf::create_atom(ws, "C", mf::Vec3(1.54, 0, 0));
    CHECK(mf::export_xyz(ws) ==
          "2\nmolecusense export\nC 0.000000 0.000000 0.000000\nC 1.540000 0.000000 0.000000\n");

    mf::Workspace methane;
    fixtures::build_methane(methane);
    std::istringstream in(mf::export_xyz(methane));
    int n = 0;
    std::string comment;
    in >> n;
    in.ignore();
    std::getline(in, comment);
    REQUIRE(n == 5);
    std::vector<mf::Vec3> pts;
    for (int i = 0; i < n; ++i) {
        std::string sym;
        double x, y, z;
        in >> sym >> x >> y >> z;
        pts.emplace_back(x, y, z);
    }
    // Four equal C-H distances and six equal H-H distances of a regular tetrahedron.
    for (int i = 1; i < 5; ++i) CHECK(std::abs((pts[i] - pts[0]).norm() - 1.09) < 1e-5);
    const double hh = 1.09 * std::sqrt(8.0 / 3.0);
    for (int i = 1; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) CHECK(std::abs((pts[i] - pts[j]).norm() - hh) < 1e-5);
}

TEST_CASE("shipped cyclopentane") {
    const auto ws = mf::load_xml(mf::read_file(std::filesystem::path(MOLECUFORGE_SOURCE_DIR) / "data/cyclopentane.xml"));
    REQUIRE(ws.atoms.size() == 5);
    REQUIRE(ws.bonds.size() == 5);
    std::vector<std::pair<int, int>> edges, ring;
    std::map<mf::AtomId, int> index;
    for (const auto& [id, a] : ws.atoms) index.emplace(id, static_cast<int>(index.size()));
    for (const auto& [id, b] : ws.bonds) edges.emplace_back(index.at(b.ends[0].atom_id), index.at(b.ends[1].atom_id));
    for (int i = 0; i < 5; ++i) ring.emplace_back(i, (i + 1) % 5);
    CHECK(fixtures::bfs_component(0, edges).size() == 5);
    CHECK(fixtures::isomorphic(edges, ring, 5));
}

TEST_CASE("file helpers") {
    CHECK_THROWS_AS(mf::read_file("/nonexistent/dir/file.xml"), mf::Error);
    const auto tmp = std::filesystem::temp_directory_path() / "molecuforge_persist_test.xml";
    mf::write_file(tmp, "abc");
    CHECK(mf::read_file(tmp) == "abc");
    std::filesystem::remove(tmp);
}

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bsswitch/rem_store.hpp"

using namespace bsswitch;

namespace {

UePositionSet state(std::vector<Vec2> pts, double g = 3.0)
{
    return UePositionSet(std::move(pts), g);
}

RemDb sample_db()
{
    RemDb db(3.0, 3, 0.0);
    db.match_or_insert(state({{0, 0}, {3, 6}}));
    db.match_or_insert(state({{30, -9}}));
    db.record(0, ActiveSet::from_index(2, 3), 0.1 + 0.2);
    db.record(0, ActiveSet::from_index(2, 3), 1.0 / 3.0);
    db.record(1, ActiveSet::from_index(0, 3), 2.5e-7);
    return db;
}

std::filesystem::path temp_file(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("bsswitch_test_" + name);
}

}  // namespace

TEST_CASE("match_or_insert on an empty db creates an entry")
{
    RemDb db(3.0, 4);
    const MatchResult m = db.match_or_insert(state({{0, 0}}));
    CHECK(m.was_new);
    CHECK(m.index == 0);
    CHECK(db.size() == 1);
    CHECK(db.entry(0).q.size() == 8);
}

TEST_CASE("match_or_insert finds an exact match")
{
    RemDb db(3.0, 4);
    db.match_or_insert(state({{0, 0}, {3, 3}}));
    const MatchResult m = db.match_or_insert(state({{3, 3}, {0, 0}}));
    CHECK_FALSE(m.was_new);
    CHECK(m.index == 0);
    CHECK(m.distance == 0.0);
}

TEST_CASE("match_or_insert matches below the grid size and keeps the stored label")
{
    RemDb db(3.0, 2);
    db.match_or_insert(state({{0, 0}}));
    const MatchResult near = db.match_or_insert(state({{2.5, 0}}));
    CHECK_FALSE(near.was_new);
    CHECK(near.distance == 2.5);
    CHECK(db.entry(0).state.points() == std::vector<Vec2>{{0, 0}});

    const MatchResult far = db.match_or_insert(state({{3, 0}}));
    CHECK(far.was_new);
    CHECK(db.size() == 2);
}

TEST_CASE("record increments one action only")
{
    RemDb db(3.0, 3);
    db.match_or_insert(state({{0, 0}}));
    const ActiveSet a = ActiveSet::from_index(1, 3);
    db.record(0, a, 0.7);
    CHECK(db.entry(0).n[1] == 1);
    db.record(0, a, 0.8);
    CHECK(db.entry(0).n[1] == 2);
    CHECK(db.entry(0).q[1] == 0.8);
    for (std::size_t i : {0u, 2u, 3u}) {
        CHECK(db.entry(0).q[i] == 0.0);
        CHECK(db.entry(0).n[i] == 0);
    }
    CHECK(db.entry(0).total_visits() == 2);
}

TEST_CASE("save then load reproduces the db exactly")
{
    const RemDb db = sample_db();
    const auto path = temp_file("roundtrip.rem");
    save(db, path);
    const RemDb back = load(path);
    CHECK(back == db);
    CHECK(back.entry(0).q[2] == 1.0 / 3.0);
    std::filesystem::remove(path);
}

TEST_CASE("truncated files are rejected as corrupt")
{
    std::ostringstream os;
    write_rem(sample_db(), os);
    const std::string text = os.str();
    for (std::size_t cut : {text.size() - 4, text.size() / 2, std::size_t{10}}) {
        std::istringstream is(text.substr(0, cut));
        try {
            read_rem(is);
            FAIL("expected a corrupt-file error at cut " << cut);
        } catch (const RemFileError& e) {
            CHECK(e.kind() == RemFileError::Kind::corrupt);
        }
    }
}

TEST_CASE("a newer format version is rejected with both versions named")
{
    std::istringstream is("bsswitch-rem format_version=2 g=3 n_bs=2 entry_count=0 initial_q=0\nend\n");
    try {
        read_rem(is);
        FAIL("expected a version error");
    } catch (const RemFileError& e) {
        CHECK(e.kind() == RemFileError::Kind::version);
        const std::string what = e.what();
        CHECK(what.find('2') != std::string::npos);
        CHECK(what.find('1') != std::string::npos);
    }
}

TEST_CASE("duplicate states in a file break the db invariant")
{
    std::istringstream is("bsswitch-rem format_version=1 g=3 n_bs=2 entry_count=2 initial_q=0\n"
                          "entry 1 0 0 q 0 0 n 0 0\n"
                          "entry 1 0 0 q 0 0 n 0 0\n"
                          "end\n");
    CHECK_THROWS_AS(read_rem(is), RemFileError);
}

TEST_CASE("loading a missing file is an io error")
{
    try {
        load(temp_file("does_not_exist.rem"));
        FAIL("expected an io error");
    } catch (const RemFileError& e) {
        CHECK(e.kind() == RemFileError::Kind::io);
    }
}

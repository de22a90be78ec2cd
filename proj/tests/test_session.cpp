#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace questforge;
using nlohmann::json;
namespace ts = testing_support;

namespace {

SessionConfig config_with(std::uint64_t seed, const std::string& id) {
    SessionConfig cfg;
    cfg.seed = seed;
    cfg.session_id = id;
    return cfg;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_log(const std::filesystem::path& p, const std::vector<LogRecord>& records) {
    std::ofstream out(p);
    for (const LogRecord& r : records) out << r.to_line() << '\n';
}

Command say(std::string text) {
    Command c;
    c.verb = Verb::say;
    c.text = std::move(text);
    return c;
}

Command move(Direction dir, int steps) {
    Command c;
    c.verb = Verb::move;
    c.dir = dir;
    c.count = steps;
    return c;
}

/// Folds world events and NPC exchanges from the log into fresh progress.
QuestProgress rederive(const std::vector<LogRecord>& log, std::vector<std::pair<std::string, std::int64_t>>& stamped) {
    QuestProgress p;
    for (const LogRecord& r : log) {
        std::vector<QuestStep> steps;
        if (r.kind == "world_event") {
            steps = p.observe(world_event_from_json(r.payload), r.tick);
        } else if (r.kind == "utterance" && (r.actor == kElenaId || r.actor == kAlaricId)) {
            steps = p.observe_exchange(r.actor, r.tick);
        }
        for (QuestStep s : steps) stamped.emplace_back(std::string(1, letter_of(s)), r.tick);
    }
    return p;
}

}  // namespace

TEST(Commands, JsonAndLineForms) {
    const Command c = Command::parse_line("move north 3");
    EXPECT_EQ(c.verb, Verb::move);
    EXPECT_EQ(c.count, 3);
    EXPECT_EQ(Command::from_json(c.to_json()).to_json(), c.to_json());
    EXPECT_EQ(Command::parse_line("say hello there").text, "hello there");
    EXPECT_EQ(Command::parse_line("give alaric diamond_sword").to, "alaric");
    EXPECT_THROW(Command::parse_line("dance"), std::invalid_argument);
    EXPECT_THROW(Command::from_json(json{{"type", "move"}, {"dir", "sideways"}}), std::invalid_argument);
    EXPECT_THROW(Command::from_json(json{{"type", "say"}}), std::invalid_argument);
}

TEST(LogRecords, FixedFieldOrderRoundTrip) {
    LogRecord r;
    r.session = "s";
    r.seq = 3;
    r.tick = 9;
    r.kind = "warning";
    r.actor = "elena";
    r.payload = {{"z", 1}, {"a", "b"}};
    const std::string line = r.to_line();
    EXPECT_EQ(line.rfind("{\"session\":\"s\",\"seq\":3,\"tick\":9,\"kind\":\"warning\",\"actor\":\"elena\",\"payload\":", 0), 0u);
    EXPECT_EQ(LogRecord::from_line(line).to_line(), line);
    EXPECT_THROW(LogRecord::from_line("{\"seq\":1}"), std::invalid_argument);
}

TEST(SessionConfig, Validation) {
    SessionConfig cfg;
    cfg.k = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = SessionConfig{};
    cfg.turn_budget = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Session, WalkthroughCompletesTheQuest) {
    const auto path = ts::log_file("walkthrough-seed7");
    auto s = run_session(config_with(7, "walkthrough-seed7"), ts::walkthrough_backend(),
                         load_commands(ts::walkthrough_player()), path);
    EXPECT_TRUE(s->progress().complete());
    EXPECT_EQ(s->end_reason(), "quest_complete");
    EXPECT_LE(s->commands(), 200);
    EXPECT_LE(s->world().state().tick, 5000);
    EXPECT_EQ(read_file(path), s->log_text());

    int quest_steps = 0;
    for (const LogRecord& r : s->log()) quest_steps += r.kind == "quest_step";
    EXPECT_EQ(quest_steps, static_cast<int>(kQuestSteps));
}

TEST(Session, SameInputsSameLog) {
    auto a = run_session(config_with(7, "x"), ts::walkthrough_backend(), load_commands(ts::walkthrough_player()));
    auto b = run_session(config_with(7, "x"), ts::walkthrough_backend(), load_commands(ts::walkthrough_player()));
    EXPECT_EQ(a->log_text(), b->log_text());
}

TEST(Session, SeqIsDenseAndStartsWithTheSessionRecord) {
    Session s(config_with(7, "dense"), ts::walkthrough_backend(), ts::log_file("dense"));
    s.apply(say("hello"));
    s.finish("input_exhausted");
    ASSERT_FALSE(s.log().empty());
    EXPECT_EQ(s.log().front().kind, "session");
    EXPECT_EQ(s.log().front().payload.at("event"), "start");
    for (std::size_t i = 0; i < s.log().size(); ++i) EXPECT_EQ(s.log()[i].seq, static_cast<std::int64_t>(i) + 1);
    EXPECT_EQ(s.log().back().payload.at("event"), "end");
    EXPECT_EQ(s.log().back().payload.at("world_digest"), sha256_hex(s.world().serialize()));
}

TEST(Session, SayOutOfEarshot) {
    Session s(config_with(7, "earshot"), ts::walkthrough_backend(), ts::log_file("earshot"));
    ASSERT_EQ(s.listener(), kElenaId);
    s.apply(move(Direction::east, 16));
    const auto& player = s.world().state().find(kPlayerId)->position;
    ASSERT_FALSE(within(player, s.world().state().find(kElenaId)->position, kHearingRadius));
    EXPECT_FALSE(s.listener());

    const auto records = s.apply(say("Is anyone there?"));
    bool system_reply = false, npc_reply = false;
    for (const LogRecord& r : records) {
        if (r.kind == "command") {
            EXPECT_EQ(r.payload.at("result"), "no one can hear you");
        }
        if (r.kind == "utterance" && r.actor == "system") system_reply = r.payload.at("text") == "no one can hear you";
        if (r.kind == "utterance" && (r.actor == kElenaId || r.actor == kAlaricId)) npc_reply = true;
    }
    EXPECT_TRUE(system_reply);
    EXPECT_FALSE(npc_reply);
    EXPECT_EQ(s.conversation(kElenaId).exchange_count, 0);
    s.finish("input_exhausted");
}

TEST(Session, TurnBudgetOfOne) {
    SessionConfig cfg = config_with(7, "budget1");
    cfg.turn_budget = 1;
    auto s = run_session(cfg, ts::walkthrough_backend(), load_commands(ts::walkthrough_player()),
                         ts::log_file("budget1"));
    EXPECT_EQ(s->commands(), 1);
    EXPECT_EQ(s->end_reason(), "turn_budget");
    EXPECT_THROW(s->apply(say("hello")), std::logic_error);
}

TEST(Session, TickBudget) {
    SessionConfig cfg = config_with(7, "ticks");
    cfg.tick_budget = 10;
    Command wait;
    wait.verb = Verb::wait;
    wait.count = 25;
    auto s = run_session(cfg, ts::walkthrough_backend(), {wait, wait}, ts::log_file("ticks"));
    EXPECT_EQ(s->end_reason(), "tick_budget");
    EXPECT_EQ(s->commands(), 1);
}

TEST(Session, FinishIsIdempotent) {
    Session s(config_with(7, "idem"), ts::walkthrough_backend());
    EXPECT_FALSE(s.finish("input_exhausted").empty());
    EXPECT_TRUE(s.finish("other").empty());
    EXPECT_EQ(s.end_reason(), "input_exhausted");
}

TEST(Session, DegradedTurnsAreLogged) {
    Session s(config_with(7, "degraded"), std::make_shared<ts::FailingBackend>(LlmErrorKind::transport),
              ts::log_file("degraded"));
    const std::string before = s.world().serialize();
    const auto records = s.apply(say("hello"));
    bool degraded = false, warned = false;
    for (const LogRecord& r : records) {
        if (r.kind == "utterance" && r.actor == kElenaId) {
            degraded = r.payload.at("degraded").get<bool>();
            EXPECT_EQ(r.payload.at("text"), std::string(kDegradedReply));
        }
        warned = warned || r.kind == "warning";
    }
    EXPECT_TRUE(degraded);
    EXPECT_TRUE(warned);
    s.finish("input_exhausted");
    EXPECT_EQ(s.progress().completed_count(), 1u);  // talking still counts
}

TEST(Session, QuestProgressRederivedFromTheLog) {
    auto s = run_session(config_with(7, "rederive"), ts::walkthrough_backend(), load_commands(ts::walkthrough_player()));
    std::vector<std::pair<std::string, std::int64_t>> oracle;
    const QuestProgress p = rederive(s->log(), oracle);
    EXPECT_EQ(p, s->progress());

    std::vector<std::pair<std::string, std::int64_t>> logged;
    for (const LogRecord& r : s->log())
        if (r.kind == "quest_step") logged.emplace_back(r.payload.at("step").get<std::string>(), r.tick);
    EXPECT_EQ(logged, oracle);
}

TEST(Replay, WalkthroughIsIdentical) {
    auto s = run_session(config_with(7, "replay-walk"), ts::walkthrough_backend(),
                         load_commands(ts::walkthrough_player()), ts::log_file("replay-walk"));
    const ReplayResult r = replay(read_log(ts::log_file("replay-walk")));
    EXPECT_TRUE(r.identical);
    EXPECT_FALSE(r.first_difference);
    EXPECT_EQ(r.session->log_text(), s->log_text());
    EXPECT_EQ(r.session->world().serialize(), s->world().serialize());
}

TEST(Replay, DegradedSessionReplays) {
    Session s(config_with(9, "replay-degraded"), std::make_shared<ts::FailingBackend>(LlmErrorKind::timeout));
    s.apply(say("hello"));
    s.finish("input_exhausted");
    EXPECT_TRUE(replay(s.log()).identical);
}

TEST(Replay, SeqGapNamesTheSeq) {
    auto s = run_session(config_with(7, "gap"), ts::walkthrough_backend(), load_commands(ts::walkthrough_player()));
    std::vector<LogRecord> log = s->log();
    log.erase(log.begin() + 20);
    try {
        replay(log);
        FAIL();
    } catch (const ReplayFailure& e) {
        EXPECT_EQ(e.seq(), 22);
        EXPECT_NE(std::string(e.what()).find("expected 21, found 22"), std::string::npos);
    }
}

TEST(Replay, AlteredCommandFailsAtItsCompletion) {
    auto s = run_session(config_with(7, "altered"), ts::walkthrough_backend(), load_commands(ts::walkthrough_player()));
    std::vector<LogRecord> log = s->log();
    std::int64_t first_completion = 0;
    for (LogRecord& r : log) {
        if (r.kind == "command" && r.payload.at("command").at("type") == "say") {
            r.payload["command"]["text"] = "something else entirely";
            break;
        }
    }
    for (const LogRecord& r : log) {
        if (r.kind == "utterance" && r.actor == kElenaId) {
            first_completion = r.seq;
            break;
        }
    }
    try {
        replay(log);
        FAIL();
    } catch (const ReplayFailure& e) {
        EXPECT_EQ(e.seq(), first_completion);
        EXPECT_NE(std::string(e.what()).find("digest mismatch at turn 1"), std::string::npos);
    }
}

TEST(Replay, EditedRecordIsReportedAsTheFirstDifference) {
    auto s = run_session(config_with(7, "edited"), ts::walkthrough_backend(), load_commands(ts::walkthrough_player()));
    std::vector<LogRecord> log = s->log();
    std::int64_t edited = 0;
    for (LogRecord& r : log) {
        if (r.kind == "utterance" && r.actor == kPlayerId) {
            r.payload["text"] = "something else entirely";
            edited = r.seq;
            break;
        }
    }
    const ReplayResult r = replay(log);
    EXPECT_FALSE(r.identical);
    EXPECT_EQ(r.first_difference, edited);
}

TEST(Replay, TruncatedLogFails) {
    auto s = run_session(config_with(7, "trunc"), ts::walkthrough_backend(), load_commands(ts::walkthrough_player()));
    std::vector<LogRecord> log = s->log();
    log.resize(log.size() / 2);
    try {
        replay(log);
        FAIL();
    } catch (const ReplayFailure& e) {
        EXPECT_NE(std::string(e.what()).find("truncated"), std::string::npos);
    }
}

TEST(Replay, EmptyLogIsAFreshWorld) {
    const ReplayResult r = replay({}, 7);
    ASSERT_TRUE(r.session);
    EXPECT_EQ(r.session->world().serialize(), World::create(7).serialize());
    EXPECT_EQ(r.session->world().state().tick, 0);
}

TEST(Replay, ReadsWhatWasWritten) {
    const auto path = ts::log_file("roundtrip");
    auto s = run_session(config_with(11, "roundtrip"), ts::walkthrough_backend(), load_commands(ts::walkthrough_player()));
    write_log(path, s->log());
    EXPECT_EQ(read_file(path), s->log_text());
    EXPECT_TRUE(replay(read_log(path)).identical);
}

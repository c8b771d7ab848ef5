#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "delta/core/engine.hpp"
#include "delta/core/retrieval.hpp"
#include "delta/dsl/parser.hpp"
#include "delta/error.hpp"
#include "delta/proxy/http_chat.hpp"
#include "delta/proxy/prompts.hpp"
#include "delta/proxy/scripted.hpp"
#include "httplib.h"
#include "support/test_support.hpp"

namespace delta::proxy {
namespace {

using nlohmann::json;

core::EngineState fresh() { return core::init_engine(testing::green_bug_script()); }

TEST(Prompts, EntryPromptListsEverySignature) {
  auto sk = core::skeleton(fresh());
  core::Instruction x{"switch to Water type when hit by a Fire move", core::Author::player};
  auto p = build_entry_prompt(sk, x);
  for (const char* sig : {"get_power(m, b)", "set_boost(stat, n)", "type_change(t1, t2)", "move_1()", "move_2()"}) {
    EXPECT_NE(p.user.find(sig), std::string::npos) << sig;
  }
  EXPECT_NE(p.user.find(x.text), std::string::npos);
  EXPECT_EQ(p.user.find("deal_damage"), std::string::npos);  // bodies omitted
  EXPECT_EQ(p.temperature, 0.0);
  EXPECT_EQ(p.template_version, kTemplateVersion);
  EXPECT_EQ(p, build_entry_prompt(sk, x));
}

TEST(Prompts, DeltaPromptEmbedsBodiesAndCheatSheet) {
  auto s = fresh();
  auto ctx = core::retrieve(s, {"get_power", "set_boost"});
  core::Instruction x{"raise attack whenever power is boosted", core::Author::player};
  auto p = build_delta_prompt(ctx, x);
  EXPECT_NE(p.user.find(ctx.render()), std::string::npos);
  EXPECT_NE(p.user.find(grammar_cheat_sheet()), std::string::npos);
  EXPECT_NE(p.user.find("increment GreenBug"), std::string::npos);
  EXPECT_EQ(p.temperature, kGenerateTemperature);
  EXPECT_EQ(p, build_delta_prompt(ctx, x));
}

TEST(Extract, FirstFenceOrWhole) {
  EXPECT_EQ(extract_delta("```dsl\nincrement A {\n}\n```"), "increment A {\n}");
  EXPECT_EQ(extract_delta("Sure.\n```\nfirst\n```\nand\n```\nsecond\n```"), "first");
  EXPECT_EQ(extract_delta("  increment A { fn move_1() { heal(1) } }\n"), "increment A { fn move_1() { heal(1) } }");
  EXPECT_THROW(extract_delta(" \n\t "), EmptyResponse);
  EXPECT_THROW(extract_delta("```\n\n```"), EmptyResponse);
}

TEST(EntryNames, ToleratesListDecoration) {
  EXPECT_EQ(parse_entry_names("get_power\nset_boost\n"), (std::vector<std::string>{"get_power", "set_boost"}));
  EXPECT_EQ(parse_entry_names("- `get_power`\n2. set_boost()\nI think these.\n* move_1"),
            (std::vector<std::string>{"get_power", "set_boost", "move_1"}));
}

TEST(Scripted, RequiresRules) { EXPECT_THROW(ScriptedProxy({}), std::invalid_argument); }

TEST(Scripted, PrefixAndExact) {
  ScriptedProxy p({{"learn Rayquazalize*", {"type_change"}, testing::kRayquazalize},
                   {"exact", {"move_2"}, "increment {{role}} { fn move_2() { heal(5) } }"}});
  auto s = fresh();
  auto sk = core::skeleton(s);
  EXPECT_EQ(p.select_entries(sk, {"learn Rayquazalize now"}), (std::vector<std::string>{"type_change"}));
  EXPECT_EQ(extract_delta(p.generate_delta(core::retrieve(s, {"move_2"}), {"exact"})),
            "increment GreenBug { fn move_2() { heal(5) } }");
  // "exact" is not a prefix rule
  EXPECT_EQ(p.select_entries(sk, {"exactly"}), (std::vector<std::string>{"move_1"}));
}

TEST(Scripted, IdentityFallbackRestatesMove1) {
  ScriptedProxy p({{"never", {}, ""}});
  auto s = fresh();
  core::Instruction x{"something"};
  auto names = p.select_entries(core::skeleton(s), x);
  auto src = extract_delta(p.generate_delta(core::retrieve(s, names), x));
  auto merged = core::merge(dsl::parse_delta(src), s);
  EXPECT_EQ(merged.role(), s.role());
}

TEST(Scripted, FailFromStep) {
  ScriptedProxy p({{"never", {}, ""}}, ScriptedProxy::Fallback::grow);
  p.fail_from_step(0);
  auto s = fresh();
  EXPECT_EQ(p.generate_delta(core::retrieve(s, {"move_1"}), {"x"}), ScriptedProxy::kUnparseable);
}

TEST(Scripted, FromJson) {
  auto p = ScriptedProxy::from_json(json::parse(R"({"rules":[{"pattern":"a*","select":["move_1"],
    "delta":"increment {{role}} { fn move_1() { heal(1) } }"}],"fallback":"failure"})"));
  auto s = fresh();
  EXPECT_EQ(p.generate_delta(core::retrieve(s, {"move_1"}), {"zzz"}), ScriptedProxy::kUnparseable);
  EXPECT_THROW(ScriptedProxy::from_json(json::parse(R"({"rules":[],"fallback":"nope"})")), std::exception);
}

TEST(ProxyConfig, Checks) {
  ProxyConfig c;
  EXPECT_NO_THROW(c.check());
  c.retry_count = 6;
  EXPECT_THROW(c.check(), Error);
  c = {};
  c.timeout_seconds = 0;
  EXPECT_THROW(c.check(), Error);
  c = {};
  EXPECT_EQ(ProxyConfig::from_json(c.to_json()).to_json(), c.to_json());
  EXPECT_FALSE(c.to_json().contains("api_key"));
}

// Local chat-completion endpoint on an ephemeral port.
class MockEndpoint {
 public:
  explicit MockEndpoint(httplib::Server::Handler h) {
    server_.Post("/v1/chat/completions", std::move(h));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockEndpoint() {
    server_.stop();
    thread_.join();
  }

  ProxyConfig config() const {
    ProxyConfig c;
    c.endpoint_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    c.api_key_env = "DELTA_TEST_PROXY_KEY";
    c.timeout_seconds = 2;
    c.backoff_initial_ms = 10;
    return c;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string completion(const std::string& content) {
  return json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

TEST(HttpChatProxy, CannedCompletionGivesNames) {
  json seen;
  std::string auth;
  MockEndpoint ep([&](const httplib::Request& req, httplib::Response& res) {
    seen = json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(completion("get_power\nset_boost"), "application/json");
  });
  ::setenv("DELTA_TEST_PROXY_KEY", "sk-test-123", 1);
  HttpChatProxy p(ep.config());
  auto names = p.select_entries(core::skeleton(fresh()), {"boost"});
  ::unsetenv("DELTA_TEST_PROXY_KEY");
  EXPECT_EQ(names, (std::vector<std::string>{"get_power", "set_boost"}));
  EXPECT_EQ(seen["model"], "default");
  EXPECT_EQ(seen["temperature"], 0.0);
  EXPECT_EQ(seen["max_tokens"], 128);
  ASSERT_EQ(seen["messages"].size(), 2u);
  EXPECT_EQ(seen["messages"][0]["role"], "system");
  EXPECT_EQ(seen["messages"][1]["role"], "user");
  EXPECT_EQ(auth, "Bearer sk-test-123");
  EXPECT_EQ(seen.dump().find("sk-test-123"), std::string::npos);
}

TEST(HttpChatProxy, RetriesAfter500) {
  std::atomic<int> calls{0};
  MockEndpoint ep([&](const httplib::Request&, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 500;
      return;
    }
    res.set_content(completion("```\nincrement GreenBug { fn move_1() { heal(1) } }\n```"), "application/json");
  });
  auto cfg = ep.config();
  cfg.retry_count = 2;
  HttpChatProxy p(cfg);
  auto s = fresh();
  auto raw = p.generate_delta(core::retrieve(s, {"move_1"}), {"heal"});
  EXPECT_EQ(extract_delta(raw), "increment GreenBug { fn move_1() { heal(1) } }");
  EXPECT_EQ(calls.load(), 2);
}

TEST(HttpChatProxy, ClientErrorIsNotRetried) {
  std::atomic<int> calls{0};
  MockEndpoint ep([&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 401;
  });
  auto cfg = ep.config();
  cfg.retry_count = 3;
  HttpChatProxy p(cfg);
  try {
    p.select_entries(core::skeleton(fresh()), {"x"});
    FAIL();
  } catch (const ProxyError& e) {
    EXPECT_EQ(e.kind(), ProxyError::Kind::bad_status);
    EXPECT_EQ(e.status(), 401);
  }
  EXPECT_EQ(calls.load(), 1);
}

TEST(HttpChatProxy, TimeoutAfterRetries) {
  std::atomic<int> calls{0};
  MockEndpoint ep([&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    std::this_thread::sleep_for(std::chrono::milliseconds(900));
    res.set_content(completion("late"), "application/json");
  });
  auto cfg = ep.config();
  cfg.timeout_seconds = 0.25;
  cfg.retry_count = 1;
  HttpChatProxy p(cfg);
  try {
    p.select_entries(core::skeleton(fresh()), {"x"});
    FAIL();
  } catch (const ProxyError& e) {
    EXPECT_EQ(e.kind(), ProxyError::Kind::timeout);
  }
  EXPECT_EQ(calls.load(), 2);
}

TEST(HttpChatProxy, UnreachableIsTransport) {
  ProxyConfig cfg;
  cfg.endpoint_url = "http://127.0.0.1:1/v1/chat/completions";
  cfg.retry_count = 0;
  cfg.timeout_seconds = 1;
  HttpChatProxy p(cfg);
  try {
    p.select_entries(core::skeleton(fresh()), {"x"});
    FAIL();
  } catch (const ProxyError& e) {
    EXPECT_EQ(e.kind(), ProxyError::Kind::transport);
  }
}

}  // namespace
}  // namespace delta::proxy

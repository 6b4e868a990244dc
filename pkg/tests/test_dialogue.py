import copy

import pytest

from newsagent.dialogue import (
    DialogueManager,
    DialogueState,
    Goodbye,
    Help,
    PlaybackDirective,
    ReadArticle,
    Say,
    SuggestArticles,
    Suggestion,
    UnsupportedLanguageError,
)
from newsagent.nlu import INTENT_NAMES, IntentResult
from newsagent.query import TemplateRegistry


@pytest.fixture()
def manager(store10, gazetteer):
    return DialogueManager(store10, TemplateRegistry.builtin(), gazetteer)


def result(intent, **slots):
    return IntentResult(intent, {k: str(v) for k, v in slots.items()}, 1.0)


def say_keys(actions):
    return [a.text_key for a in actions if isinstance(a, Say)]


# -- session lifecycle ---------------------------------------------------------


def test_new_session_greets(manager):
    session, actions = manager.new_session("en")
    assert session.state is DialogueState.IDLE
    assert session.suggestions == []
    assert say_keys(actions) == ["greeting"]


def test_new_session_german(manager):
    session, actions = manager.new_session("de")
    assert session.language == "de"
    assert say_keys(actions) == ["greeting"]


def test_new_session_unknown_language(manager):
    with pytest.raises(UnsupportedLanguageError):
        manager.new_session("xx")


# -- overview / browsing ---------------------------------------------------------


def test_overview_three_distinct_resorts(manager, store10):
    session, _ = manager.new_session("en")
    session, actions = manager.handle(session, result("overview"))
    assert session.state is DialogueState.BROWSING
    suggest = [a for a in actions if isinstance(a, SuggestArticles)]
    assert len(suggest) == 1 and len(suggest[0].items) == 3
    keys = [item.key for item in suggest[0].items]
    assert keys == ["desk:s4", "desk:p2", "desk:e3"]  # newest per top-3 resort


def test_list_resorts(manager):
    session, _ = manager.new_session("en")
    session, actions = manager.handle(session, result("list_resorts"))
    assert say_keys(actions) == ["resort_list"]
    params = dict(actions[0].params)
    assert "sports" in params["names"]


def test_resort_search_pages_of_three(manager):
    session, _ = manager.new_session("en")
    session, actions = manager.handle(session, result("resort_search", resort="Sports"))
    items = actions[0].items
    assert [i.key for i in items] == ["desk:s4", "desk:s3", "desk:s2"]
    session, actions = manager.handle(session, result("more_suggestions"))
    assert [i.key for i in actions[0].items] == ["desk:s1"]
    session, actions = manager.handle(session, result("more_suggestions"))
    assert say_keys(actions) == ["no_more_suggestions"]


def test_unknown_resort(manager):
    session, _ = manager.new_session("en")
    session, actions = manager.handle(session, result("resort_search", resort="gardening"))
    assert say_keys(actions) == ["unknown_resort"]
    assert session.state is DialogueState.IDLE


def test_entity_search_via_gazetteer_alias(manager):
    session, _ = manager.new_session("en")
    session, actions = manager.handle(
        session, result("entity_search", entity_text="donald trump")
    )
    assert [i.key for i in actions[0].items] == ["desk:p2", "desk:e2", "desk:p1"]


def test_entity_search_falls_back_to_tag(manager):
    session, _ = manager.new_session("en")
    session, actions = manager.handle(
        session, result("entity_search", entity_text="championship")
    )
    assert [i.key for i in actions[0].items] == ["desk:s4"]


def test_entity_search_unknown(manager):
    session, _ = manager.new_session("en")
    session, actions = manager.handle(
        session, result("entity_search", entity_text="flying saucers")
    )
    assert say_keys(actions) == ["no_entity_found"]


# -- selection and reading ------------------------------------------------------


def browse(manager):
    session, _ = manager.new_session("en")
    session, actions = manager.handle(session, result("overview"))
    return session, actions


def test_select_second_suggestion_reads_opening(manager):
    session, _ = browse(manager)
    session, actions = manager.handle(session, result("select_suggestion", ordinal=2))
    assert session.state is DialogueState.READING
    assert session.current_article == "desk:p2"
    reads = [a for a in actions if isinstance(a, ReadArticle)]
    assert len(reads) == 1
    assert reads[0].part == "opening"
    assert reads[0].title == "Parliament debates election reform bill"
    assert "Parliament debated the election reform bill" in reads[0].text


def test_related_suggestions_after_reading(manager, store10):
    from newsagent.query import related_articles

    session, _ = browse(manager)
    session, actions = manager.handle(session, result("select_suggestion", ordinal=2))
    suggest = [a for a in actions if isinstance(a, SuggestArticles)]
    related = related_articles("desk:p2", 3, store10)
    assert related, "fixture should have related articles"
    assert len(suggest) == 1 and suggest[0].related
    assert [i.key for i in suggest[0].items] == [snap.key for snap, _ in related]
    assert [i.key for i in suggest[0].items] == ["desk:p1", "desk:e2"]


def test_select_out_of_range(manager):
    session, _ = browse(manager)
    before = copy.deepcopy(session.suggestions)
    session, actions = manager.handle(session, result("select_suggestion", ordinal=7))
    assert say_keys(actions) == ["out_of_range"]
    assert dict(actions[0].params)["count"] == "3"
    assert session.suggestions == before
    assert session.state is DialogueState.BROWSING


def test_select_without_suggestions(manager):
    session, _ = manager.new_session("en")
    session, actions = manager.handle(session, result("select_suggestion", ordinal=1))
    assert say_keys(actions) == ["no_suggestions"]


def test_ambiguous_selection_asks_which_one(manager):
    session, _ = browse(manager)
    session, actions = manager.handle(
        session, IntentResult("select_suggestion", {"ambiguous": "true"}, 0.5)
    )
    assert say_keys(actions) == ["which_one"]


def test_read_full_after_opening(manager):
    session, _ = browse(manager)
    session, _ = manager.handle(session, result("select_suggestion", ordinal=2))
    session, actions = manager.handle(session, result("read_full"))
    reads = [a for a in actions if isinstance(a, ReadArticle)]
    assert reads[0].part == "body"
    assert "postal voting rules" in reads[0].text
    assert session.state is DialogueState.READING


def test_read_full_without_open_article(manager):
    session, _ = browse(manager)
    session, actions = manager.handle(session, result("read_full"))
    assert say_keys(actions) == ["nothing_to_read"]


def test_paging_related_articles_keeps_reading_state(manager):
    session, _ = browse(manager)
    session, _ = manager.handle(session, result("select_suggestion", ordinal=2))
    session, actions = manager.handle(session, result("more_suggestions"))
    # only two related articles exist: the second page is empty
    assert say_keys(actions) == ["no_more_suggestions"]
    assert session.state is DialogueState.READING


# -- control / smalltalk -----------------------------------------------------


def test_control_intents_passthrough(manager):
    session, _ = manager.new_session("en")
    for name, directive in [
        ("control_next", "next"),
        ("control_again", "again"),
        ("control_pause", "pause"),
        ("control_play", "play"),
    ]:
        session, actions = manager.handle(session, result(name))
        assert actions == [PlaybackDirective(directive)]


def test_help_and_goodbye(manager):
    session, _ = browse(manager)
    session, actions = manager.handle(session, result("help"))
    assert actions == [Help()]
    session, actions = manager.handle(session, result("goodbye"))
    assert actions == [Goodbye()]
    assert session.state is DialogueState.IDLE
    assert session.suggestions == [] and session.current_article is None


def test_fallback_hints_to_help(manager):
    session, _ = manager.new_session("en")
    for state_setup in ("overview", None):
        if state_setup:
            session, _ = manager.handle(session, result(state_setup))
        session, actions = manager.handle(session, IntentResult("fallback", {}, 0.0))
        assert say_keys(actions) == ["fallback_hint"]


# -- invariants ----------------------------------------------------------------


def every_state_session(manager, state):
    session, _ = manager.new_session("en")
    if state is DialogueState.BROWSING:
        session, _ = manager.handle(session, result("overview"))
    elif state is DialogueState.READING:
        session, _ = manager.handle(session, result("overview"))
        session, _ = manager.handle(session, result("select_suggestion", ordinal=1))
    return session


@pytest.mark.parametrize("state", list(DialogueState))
@pytest.mark.parametrize("intent", INTENT_NAMES)
def test_transition_table_is_total(manager, state, intent):
    session = every_state_session(manager, state)
    slots = {}
    if intent == "select_suggestion":
        slots["ordinal"] = "1"
    elif intent == "resort_search":
        slots["resort"] = "sports"
    elif intent == "entity_search":
        slots["entity_text"] = "donald trump"
    session, actions = manager.handle(session, IntentResult(intent, slots, 1.0))
    assert actions, f"no actions for {state}/{intent}"
    # reading state and open article stay consistent
    assert (session.current_article is not None) == (session.state is DialogueState.READING)
    assert len(session.suggestions) <= manager.page_size


def test_handle_never_mutates_store(manager, store10):
    before = store10.stats()
    session, _ = manager.new_session("en")
    for intent, slots in [
        ("overview", {}),
        ("select_suggestion", {"ordinal": "1"}),
        ("read_full", {}),
        ("entity_search", {"entity_text": "credit suisse"}),
        ("more_suggestions", {}),
        ("goodbye", {}),
    ]:
        session, _ = manager.handle(session, IntentResult(intent, slots, 1.0))
    assert store10.stats() == before


def test_suggestions_numbered_contiguously(manager):
    from newsagent.response import builtin_templates, render

    session, _ = browse(manager)
    _, actions = manager.handle(session, result("resort_search", resort="sports"))
    response = render(actions, builtin_templates("en"))
    assert [s.number for s in response.suggestions] == [1, 2, 3]


def test_replay_determinism(manager):
    script = [
        result("overview"),
        result("select_suggestion", ordinal=2),
        result("read_full"),
        result("resort_search", resort="sports"),
        result("more_suggestions"),
        result("goodbye"),
    ]

    def run():
        session, actions = manager.new_session("en")
        log = [actions]
        for step in script:
            session, actions = manager.handle(session, step)
            log.append(actions)
        return log

    assert run() == run()


def test_entity_search_when_session_in_reading_state(manager):
    session, _ = browse(manager)
    session, _ = manager.handle(session, result("select_suggestion", ordinal=1))
    session, actions = manager.handle(
        session, result("entity_search", entity_text="credit suisse")
    )
    assert isinstance(actions[0], SuggestArticles)
    assert session.state is DialogueState.BROWSING
    assert session.current_article is None

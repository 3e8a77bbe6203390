from ghostlist import fixtures
from ghostlist.checks import validate_graph
from ghostlist.world import PUBLIC_PROFILE, PrivacySettings, summarize_graph


def test_fixture_worlds_are_consistent():
    for build in fixtures.FIXTURE_WORLDS.values():
        assert validate_graph(build()) == []


def test_friendship_queries():
    graph = fixtures.world_w1()
    assert graph.friends_of(1) == {2, 3}
    assert graph.are_friends(1, 2)
    assert graph.are_friends(2, 1)
    assert not graph.are_friends(1, 4)


def test_hidden_pictures_leave_only_the_cover_public():
    graph = fixtures.world_w2()
    assert graph.public_pictures_of(fixtures.VICTIM) == (fixtures.COVER_PHOTO,)
    assert len(graph.users[fixtures.VICTIM].pictures) == 5


def test_hidden_groups_are_not_listable():
    graph = fixtures.world_w3()
    assert graph.listable_groups_of(fixtures.VICTIM) == {
        fixtures.PUBLIC_GROUP,
        fixtures.PRIVATE_GROUP,
    }


def test_picture_reactors_join_likers_and_commenters():
    picture = fixtures.world_w2().pictures[fixtures.COVER_PHOTO]
    assert picture.reactors == {2, 3, 4}


def test_privacy_is_public():
    assert PUBLIC_PROFILE.is_public
    assert not PrivacySettings(likes_visible=False).is_public
    assert not fixtures.LOCKED_DOWN.is_public


def test_summarize_graph():
    info = summarize_graph(fixtures.world_w1())
    assert info.n_users == 6
    assert info.n_pages == 2
    assert info.mean_degree == 8 / 6
    assert info.fraction_friends_hidden == 1 / 6
    assert info.fraction_public == 5 / 6
    assert info.largest_page_fan_count == 4

import pytest

DATASET_TEXT = """\
# four word problems
0 ||| What is 2 + 2? ||| four tokens in this answer ||| add the two twos
1 ||| What is 3 * 3? ||| nine ||| multiply three by three carefully
2 ||| What is 10 / 2? ||| five is half ||| divide ten by two
3 ||| What is 7 - 4? ||| three ||| subtract four from seven
"""


@pytest.fixture
def dataset_path(tmp_path):
    path = tmp_path / "data.txt"
    path.write_text(DATASET_TEXT)
    return str(path)


@pytest.fixture
def empty_dataset_path(tmp_path):
    path = tmp_path / "empty.txt"
    path.write_text("# nothing here\n")
    return str(path)

import glob

from doit.action import CmdAction


PACKAGE = "rotor_bands"
DOIT_CONFIG = {
    "default_tasks": ["test"]
}


def task_gettext():
    pot = f"./{PACKAGE}/locale/{PACKAGE}.pot"
    sources = glob.glob(f"./{PACKAGE}/**/*.py", recursive=True)
    sources = [i for i in sources if "__version__.py" not in i]
    command = "xgettext --add-comments=TRANSLATORS --from-code=UTF-8 -o " + pot + " " + " ".join(sources)
    return {
        "actions": [command],
        "targets": [pot],
        "file_dep": sources
    }


def task_mypy():
    sources = glob.glob(f"./{PACKAGE}/**/*.py", recursive=True)
    return {
        "actions": [f"mypy -p {PACKAGE} --ignore-missing-imports --no-implicit-optional"],
        "file_dep": sources
    }


def task_test():
    sources = glob.glob(f"./{PACKAGE}/**/*.py", recursive=True) + glob.glob("./tests/*.py")
    return {
        "actions": [
            CmdAction(lambda select: f"coverage run --source ./{PACKAGE} -m pytest tests"
                                     + (f" -k '{select}'" if select else "")),
            "coverage report --skip-empty"
        ],
        "params": [{"name": "select", "short": "k", "default": "",
                    "help": "pytest -k expression, e.g. 'not verify'"}],
        "file_dep": sources,
        "verbosity": 2
    }


def task_verify():
    return {
        "actions": [f"python -m {PACKAGE} verify --report -o verify.csv"],
        "targets": ["verify.csv"],
        "task_dep": ["test"],
        "verbosity": 2
    }


def _version() -> str:
    scope: dict = {}
    exec(open(f"./{PACKAGE}/__version__.py").read(), scope)
    return scope["__version__"]


def task_build():
    return {
        "actions": [
            f"rm -rf build dist/*{_version()}*",
            "python -m build --sdist --wheel",
        ],
        "task_dep": ["mypy", "test", "gettext"]
    }


def task_publish():
    def upload_command():
        version = _version()
        if 'dev' in version:
            raise ValueError(f"Refusing to publish development version {version}.")
        artifacts = glob.glob(f"./dist/*{version}*")
        return " && ".join([" ".join(["twine", "check"] + artifacts), " ".join(["twine", "upload"] + artifacts)])

    return {
        "actions": [CmdAction(upload_command)],
        "task_dep": ["build"]
    }

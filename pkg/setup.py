# setup.py - package install and the `scenegen` console command
from setuptools import find_packages, setup


def read_requirements(path="requirements.txt"):
    with open(path, encoding="utf-8") as handle:
        return [line.strip() for line in handle if line.strip() and not line.startswith("#") and line.strip() != "pytest"]


setup(
    name="scenegen",
    version="0.1.0",
    description="Desk-scale multiview driving-scene generation with step caching, quantized attention and gaussian reconstruction",
    packages=find_packages(include=("scenegen", "scenegen.*")),
    python_requires=">=3.9",
    install_requires=read_requirements(),
    extras_require={"test": ["pytest"]},
    entry_points={"console_scripts": ["scenegen=scenegen.cli.main:main"]},
)

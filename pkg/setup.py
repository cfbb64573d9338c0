# setup.py
from setuptools import find_packages, setup

from cmapforge import __version__

setup(
    name="cmapforge",
    version=__version__,
    description="Perceptually uniform colour maps: design, equalization, linting and rendering",
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={"cmapforge": ["data/presets.json"]},
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.24",
        "scipy>=1.10",
        "pydantic>=2.0",
        "pypng>=0.20220715",
        "mcp>=1.0,<2",
    ],
    extras_require={
        "test": ["pytest>=7.0", "colour-science>=0.4.3"],
    },
    entry_points={
        "console_scripts": [
            "cmapforge=cmapforge.cli:main",
            "cmapforge-mcp=cmapforge.mcp_server:main",
        ],
    },
)

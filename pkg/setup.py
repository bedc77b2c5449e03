import io
import re

from setuptools import setup

with io.open("sbp_induction/__init__.py", encoding="utf-8") as f:
    version = re.search(r"__version__ = \"(.+)\"", f.read()).group(1)


with open("README.md", "r") as f:
    long_description = f.read()


setup(
    name="sbp-induction",
    version=version,
    license="MIT",
    description=(
        "Summation-by-parts finite differences for the linear and Hall "
        "magnetic induction equation"
    ),
    long_description=long_description,
    long_description_content_type="text/markdown",
    keywords=["summation by parts", "finite differences", "induction equation", "mhd"],
    packages=["sbp_induction"],
    package_data={
        "sbp_induction": ["py.typed"],
    },
    zip_safe=False,
    platforms="any",
    install_requires=[
        "numpy>=1.22",
        "Flask>=2.1,<4.0",  # flask.Config.from_prefixed_env
        "click>=8.0",
    ],
    entry_points={"console_scripts": ["sbp-induction=sbp_induction.cli:cli"]},
    python_requires=">=3.9,<4",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3 :: Only",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Programming Language :: Python :: 3.13",
        "Programming Language :: Python :: Implementation :: CPython",
        "Topic :: Scientific/Engineering :: Physics",
    ],
)

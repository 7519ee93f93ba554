#!/usr/bin/env python

from setuptools import setup, find_packages

def unique_flatten_dict(d):
  return list(set(sum( d.values(), [] )))

core_requires = [
  'numpy',
  'pandas >= 1.0',
  'typing-extensions'
]

stubs = [
  'pandas-stubs'
]

dev_extras = {
    'docs': ['sphinx==3.4.3', 'docutils==0.16', 'sphinx_autodoc_typehints==1.11.1', 'sphinx-rtd-theme==0.5.1', 'Jinja2<3.1'],
    'test': ['flake8', 'hypothesis', 'mock', 'mypy', 'pytest'] + stubs,
    'build': ['build']
}

extras_require = {

  **dev_extras,

  #kitchen sink for contributors
  'dev': unique_flatten_dict(dev_extras),

}

setup(
    name='spotmarket',
    version=open('./spotmarket/_version.py').read().split("'")[1],
    packages = find_packages(exclude=['spotmarket.tests']),
    platforms='any',
    description = 'Equilibrium pricing of spot and on-demand cloud instances, with a cluster provisioning simulator',
    long_description=open("./README.md").read(),
    long_description_content_type='text/markdown',
    python_requires='>=3.7',
    install_requires=core_requires,
    extras_require=extras_require,
    entry_points={
        'console_scripts': ['spotmarket=spotmarket.cli:run_cli']
    },
    license='BSD',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'License :: OSI Approved :: BSD License',
        'Operating System :: OS Independent',
        'Intended Audience :: Science/Research',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: System :: Distributed Computing'
    ],
    keywords=['cloud', 'spot instances', 'pricing', 'game theory', 'auction', 'integer programming', 'simulation', 'Pandas']
)

#!/usr/bin/env python

from setuptools import setup

setup(name='opcore',
      package_dir={'': 'src'},
      packages=['opcore', 'opcore.tests'],
      package_data={'opcore': ['data/*.json']},
      version='0.1.0',
      python_requires='>=3.7',
      install_requires=['zope.interface >= 5.0',
                        'zope.schema >= 6.0',
                        'zope.i18nmessageid >= 5.0',
                        'zope.event >= 4.0',
                        'icalendar >= 4.0',
                        'numpy >= 1.17'],
      entry_points={'console_scripts': ['opcore = opcore.cli:main']},

      # metadata for upload to PyPI
      author='opcore contributors',
      description='Typed operads for system design, analysis and tasking',
      license='GPL2',
      keywords='operad network design wiring diagram tasking',
      long_description="""opcore models systems as operations of typed
        operads and puts them to work in three ways:

        * network design: templates of colors and interactions generate an
          operad of networks; a fleet algebra scores designs and a seeded
          search (exhaustive, annealing or genetic) finds the best fleet a
          budget buys,
        * analysis: wiring diagrams with requirement checking over a grid
          of values, diagram equality and composite failure distributions,
        * tasking: colored Petri net templates compiled to integer
          constraint systems at three levels of detail, with a built in
          branch and bound solver, CPLEX LP export and iCalendar schedules.
        """,
      classifiers=['Development Status :: 3 - Alpha',
                   'Intended Audience :: Science/Research',
                   'License :: OSI Approved :: '
                   'GNU General Public License (GPL)',
                   'Operating System :: OS Independent',
                   'Programming Language :: Python :: 3',
                   'Topic :: Scientific/Engineering'],
      platforms='All',
      )

# (C) Copyright 2026 opcore contributors
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License version 2 as published
# by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program; if not, write to the Free Software
# Foundation, Inc., 59 Temple Place - Suite 330, Boston, MA
# 02111-1307, USA.
#
# $Id$

from zope.interface import Interface, Attribute
from zope.schema import TextLine, Int, Bool, Choice, List, Float, Dict
from opcore.schema import Identifier, Probability, Quantity

from zope.i18nmessageid import MessageFactory
_ = MessageFactory("opcore")


# network operads

class IEdgeMonoid(Interface):
    """How parallel edges of one interaction combine."""

    kind = Choice(
        title=_(u"Kind"),
        values=(u'BOOLEAN_OR', u'NAT_SUM', u'NAT_MAX', u'MOD2'),
        )

    unit = Attribute("The neutral element, 0 for every kind.")

    def combine(a, b):
        """Combine two edge values."""

    def validate(value):
        """Raise OperationError unless value is a valid edge value."""

    def isIdempotent():
        """combine(a, a) == a for every value."""

    def isSelfInverse():
        """combine(a, a) == unit for every value."""


class IInteraction(Interface):
    """A named kind of edge with the color pairs it may join."""

    name = Identifier(
        title=_(u"Name"),
        required=True,
        )

    directed = Bool(
        title=_(u"Directed"),
        )

    loops = Bool(
        title=_(u"Loops allowed"),
        default=False,
        )

    allowed = Attribute("Mapping of color to the colors it may connect to.")
    monoid = Attribute("The IEdgeMonoid combining parallel edges.")

    def getKey():
        """(name, directed), unique within a template."""

    def getColors():
        """All colors the interaction mentions."""

    def allows(source, target):
        """Whether an edge from source to target is allowed. Undirected
        interactions are symmetric."""

    def allowsLoop(color):
        """Whether a node of this color may have a loop."""

    def getPairs():
        """Sorted allowed (source, target) pairs."""

    def toData():
        """JSON-ready rows of the interaction."""


class INetworkTemplate(Interface):
    """Node colors plus the interactions between them."""

    colors = Attribute("Tuple of node colors in declaration order.")
    interactions = Attribute("Ordered mapping of (name, directed) to "
                             "IInteraction.")

    def hasColor(color):
        """Whether the template knows the color."""

    def isValidType(typ):
        """Whether every entry of the sequence typ is a known color."""

    def getInteractions():
        """The interactions in declaration order."""

    def getInteraction(name, directed=None):
        """The interaction with this name; directed disambiguates when a
        name is both directed and undirected. Raises KeyError."""

    def getMonoid(key):
        """The edge monoid for an EdgeKey."""

    def checkEdge(key, colors):
        """Return the monoid of key after checking it may join nodes of
        the given colors; raise OperationError otherwise."""


class INetOperation(Interface):
    """A network operation: input types, an output type and edges."""

    template = Attribute("The INetworkTemplate it is typed over.")
    inputs = Attribute("Tuple of input types, each a tuple of colors.")
    output = Attribute("The output type, a tuple of colors.")
    slot_map = Attribute("For every output node, the (slot, position) it "
                         "comes from.")
    edges = Attribute("Read-only mapping of EdgeKey to a positive value.")

    def getNodeCount():
        """Number of output nodes."""

    def getEdgeCount():
        """Number of distinct edges with a non-zero value."""

    def getSlotCount():
        """Number of input slots."""

    def getNodeColor(node):
        """The color of an output node."""

    def getEdgeValue(key):
        """The value of an edge, the monoid unit when absent."""

    def getEdgeItems():
        """Sorted (EdgeKey, value) pairs."""

    def toDict():
        """A JSON-ready description."""


class INetworkOperad(Interface):
    """The operations over one network template, with their laws."""

    template = Attribute("The INetworkTemplate.")

    def isValidType(typ):
        """Whether typ is a sequence of template colors."""

    def generators(typ):
        """One single-edge operation per allowed edge over typ."""

    def identity(typ):
        """The one-slot identity on typ."""

    def edge(typ, interaction, endpoints, value=1, directed=None):
        """A single-edge operation over typ."""

    def operation(typ, edges):
        """A one-slot operation over typ with the given edges."""

    def parallel(f, g):
        """Disjoint union."""

    def overlay(f, g):
        """Edgewise combination of two operations of the same shape."""

    def compose(f, gs):
        """Plug gs into the input slots of f."""

    def permute(f, sigma):
        """Relabel the output nodes of f."""

    def validate(op):
        """Raise OperationError unless op belongs to this operad."""


# tasking templates

class ITransition(Interface):
    """A task: tokens leave input places and arrive at output places."""

    name = Identifier(
        title=_(u"Name"),
        required=True,
        )

    duration = Int(
        title=_(u"Duration"),
        description=_(u"Ticks the task takes at the timed level."),
        min=1,
        default=1,
        )

    inputs = Attribute("Tuple of (color, place) tokens consumed.")
    outputs = Attribute("Tuple of (color, place) tokens produced.")
    moves = Attribute("Tuple of (color, source, target), pairing inputs "
                      "and outputs of one color in declaration order.")

    def getColorCounts():
        """Mapping of color to the number of tokens of that color."""

    def getMoveGroups():
        """[((color, source, target), count)] with identical moves merged."""

    def toData():
        """A JSON-ready description."""


class ITaskingTemplate(Interface):
    """Colors, places and transitions of a tasking problem."""

    colors = Attribute("Tuple of agent colors.")
    places = Attribute("Tuple of places.")
    transitions = Attribute("Tuple of ITransition.")

    def getTransition(name):
        """The transition with this name. Raises KeyError."""

    def getTransitionIndex(name):
        """Position of the transition in declaration order."""

    def getPlaceIndex(place):
        """Position of the place in declaration order."""

    def getMaxDuration():
        """The longest transition duration, 1 without transitions."""


# algebras

class IAssetSpec(Interface):
    """One asset variant from the catalog."""

    name = Identifier(
        title=_(u"Name"),
        required=True,
        )

    color = Identifier(
        title=_(u"Color"),
        description=_(u"The node color variants of the same kind share."),
        required=True,
        )

    cost = Quantity(
        title=_(u"Cost"),
        )

    tos = Quantity(
        title=_(u"Time on station"),
        )

    speed_search = Quantity(
        title=_(u"Search speed"),
        )

    speed_max = Quantity(
        title=_(u"Maximum speed"),
        )

    sweep_widths = Dict(
        title=_(u"Sweep widths"),
        description=_(u"Sweep width per target type."),
        key_type=TextLine(),
        value_type=Float(min=0.0),
        )

    def toData():
        """A JSON-ready description."""


class ICatalog(Interface):

    assets = Attribute("Mapping of name to IAssetSpec.")

    def getAsset(name):
        """The asset called name. Raises KeyError."""

    def getAssets():
        """All assets sorted by name."""

    def getVariants(color):
        """Assets of one color sorted by name."""

    def getColors():
        """The colors of all assets, sorted."""


class IScenario(Interface):
    """Where the search happens and what it is after."""

    bases = Attribute("Tuple of Base, each with an id and a distance.")

    search_area = Quantity(
        title=_(u"Search area"),
        )

    mission_window = Quantity(
        title=_(u"Mission window"),
        )

    target_mix = Dict(
        title=_(u"Target mix"),
        description=_(u"Number of targets per type."),
        key_type=TextLine(),
        value_type=Float(min=0.0),
        )

    budget = Quantity(
        title=_(u"Budget"),
        default=0.0,
        )

    def getBase(base_id):
        """The base with this id. Raises KeyError."""

    def getBaseIds():
        """Base ids sorted."""


class IFleetDesign(Interface):
    """A network operation with an asset and a base on every node."""

    operation = Attribute("The INetOperation.")
    assets = Attribute("Tuple of IAssetSpec, one per node.")
    base_assignment = Attribute("Tuple of base ids, one per node.")
    interaction = Attribute("Name of the carrying interaction.")

    def getNodeCount():
        """Number of nodes."""

    def getCarrier(node):
        """The node carrying node, or None."""

    def getCarryChain(node):
        """The carriers of node, innermost first."""

    def getRoots():
        """Nodes nobody carries."""

    def getChildren(node):
        """Nodes node carries directly."""

    def getSubtree(root):
        """root and everything it carries, in preorder."""

    def getCost():
        """Total acquisition cost."""

    def extract(nodes):
        """The design restricted to nodes."""


class IScoreRecord(Interface):
    """Detections and the intermediate quantities behind them."""

    detections = Float(
        title=_(u"Expected detections"),
        min=0.0,
        )

    cost = Quantity(
        title=_(u"Cost"),
        )

    arrivals = Attribute("Arrival time per node.")
    search_times = Attribute("Search time per node.")
    effort = Attribute("Search effort per target type.")
    detection_probability = Attribute("Detection probability per target "
                                      "type.")

    def toDict():
        """A JSON-ready description."""


class IAlgebra(Interface):
    """An operad algebra: operations act on tuples of instances."""

    def act(operation, instances):
        """The instance the operation builds from one instance per slot."""


class IFailureDistribution(Interface):
    """Probabilities of failure labels, summing to one."""

    outcomes = Attribute("Mapping of label to probability.")

    def getLabels():
        """Labels sorted."""


class IFailureAlgebra(Interface):
    """Failure distributions attached to wiring operations."""

    assignments = Attribute("Mapping of operation name to "
                            "IFailureDistribution.")

    def getDistribution(name):
        """The distribution of operation name. Raises
        MissingAssignmentError."""

    def compositeDistribution(tree):
        """Flatten a tree of operations into a distribution over leaf
        labels."""


# wiring

class IBoundary(Interface):
    """A named box with typed, directed ports."""

    name = Identifier(
        title=_(u"Name"),
        required=True,
        )

    ports = Attribute("Tuple of Port in declaration order.")

    def getPort(name):
        """The port called name. Raises KeyError."""

    def getPortNames():
        """Port names in declaration order."""

    def hasPort(name):
        """Whether the boundary has a port called name."""

    def signature():
        """Sorted (name, space, direction) triples."""


class IWiringOp(Interface):
    """Inner boundaries wired into an outer one."""

    inner = Attribute("Tuple of inner IBoundary.")
    outer = Attribute("The outer IBoundary.")
    wires = Attribute("Sorted tuple of wire classes, each a sorted tuple "
                      "of (index, port) references; index -1 is the outer "
                      "boundary.")

    def getBoundary(index):
        """The inner boundary at index, or the outer one for -1."""

    def getPort(ref):
        """The Port an (index, port) reference points at."""

    def getRefs():
        """Every port reference, outer ports first."""

    def getLabel(ref):
        """'Boundary.port' for a reference."""

    def describe(refs):
        """Labels of several references, comma separated."""

    def getWireClass(ref):
        """The wire class containing ref."""

    def getVariables():
        """One variable name per wire class, the smallest label in it."""

    def getInnerIndex(name):
        """Index of the inner boundary called name."""


class IRequirement(Interface):
    """Admissible values per port of one boundary."""

    name = TextLine(
        title=_(u"Name"),
        required=False,
        )

    boundary = Identifier(
        title=_(u"Boundary"),
        required=True,
        )

    intervals = Attribute("Mapping of port name to sorted, disjoint closed "
                          "intervals.")

    def admits(port, value):
        """Whether value lies in one of the intervals of port."""

    def isSatisfied(values):
        """Whether every constrained port's value (from the mapping
        values) is admitted."""


# planning

class IAgent(Interface):

    id = Identifier(
        title=_(u"Id"),
        required=True,
        )

    color = Identifier(
        title=_(u"Color"),
        required=True,
        )

    start_place = Identifier(
        title=_(u"Start place"),
        required=True,
        )

    fuel_init = Float(
        title=_(u"Initial fuel"),
        )

    fuel_max = Float(
        title=_(u"Fuel capacity"),
        )

    fuel_min = Float(
        title=_(u"Reserve fuel"),
        )

    def isInterchangeable(other):
        """Whether swapping the two agents changes nothing."""


class ITaskingModel(Interface):
    """A tasking template bound to a fleet."""

    template = Attribute("The ITaskingTemplate.")
    agents = Attribute("Tuple of IAgent.")
    instances = Attribute("Sorted tuple of task instances.")
    columns = Attribute("Tuple of (agent id, place) column labels.")
    M = Attribute("Net incidence matrix, Mt - Ms.")
    Ms = Attribute("Source incidence matrix.")
    Mt = Attribute("Target incidence matrix.")

    def getColumn(agent, place):
        """Column index of (agent index, place)."""

    def getInstances(duration=None):
        """Task instances, optionally of one duration."""

    def getMatrices(duration=None):
        """(M, Ms), optionally restricted to one duration."""

    def getFleet():
        """Mapping of color to number of agents."""

    def getAgentIndex(agent_id):
        """Position of the agent. Raises PlanningError for an unknown id."""


class IConstraintSystem(Interface):
    """Variables, linear rows and an objective at one level of detail."""

    level = Choice(
        title=_(u"Level"),
        values=(u'timed', u'plan', u'counts'),
        )

    steps = Int(
        title=_(u"Steps"),
        description=_(u"Horizon in ticks, or number of plan steps."),
        min=0,
        )

    model = Attribute("The ITaskingModel.")
    variables = Attribute("Ordered mapping of name to Variable.")
    rows = Attribute("Tuple of LinearConstraint.")
    objective = Attribute("The Objective.")
    goal = Attribute("The Goal.")
    fuel = Attribute("FuelModel, or None.")
    risk = Attribute("The RiskModel.")

    def getVariable(name):
        """The variable called name."""

    def getVariables(kind=None, step=None):
        """Variables, optionally filtered by kind and step."""

    def getRows(group=None):
        """Rows, optionally of one group."""

    def getRow(name):
        """The row called name. Raises KeyError."""

    def checkAssignment(values, groups=None):
        """Rows (and bounds) violated by values."""

    def withRows(rows):
        """A copy with extra rows."""

    def withFixed(name, value):
        """A copy with variable name pinned to value."""

    def withObjective(name):
        """A copy with another objective."""


class ISolverConfig(Interface):
    """Settings of the exact solver."""

    node_limit = Int(
        title=_(u"Node limit"),
        description=_(u"Search nodes before giving up as undecided."),
        min=1,
        default=200000,
        )

    lift_cap = Int(
        title=_(u"Lift cap"),
        description=_(u"Most finer solutions a lift returns."),
        min=0,
        default=100,
        )

    symmetry = Bool(
        title=_(u"Symmetry breaking"),
        description=_(u"Order interchangeable agents by task count."),
        default=False,
        )

    fuel_rule = Choice(
        title=_(u"Fuel rule"),
        description=_(u"clamp caps fuel at capacity, literal takes the "
                      u"maximum of the update and the capacity."),
        values=(u'clamp', u'literal'),
        default=u'clamp',
        )


class ISolution(Interface):

    status = Choice(
        title=_(u"Status"),
        values=(u'optimal', u'feasible'),
        )

    system = Attribute("The IConstraintSystem solved.")
    values = Attribute("Mapping of variable name to value.")
    objective = Attribute("Value of the objective.")

    def getMakespan():
        """Tick or step by which every task has completed."""

    def getTasks():
        """ScheduledTask list ordered by start."""

    def getPositions(t):
        """Where agents (or counts) are at t."""

    def getFuel(t):
        """Fuel per agent at t, empty without fuel semantics."""

    def getSurvival():
        """Survival probability for risk objectives, else None."""

    def getKey():
        """Task decisions per non-empty step, for comparing across
        levels."""

    def toDict():
        """A JSON-ready description."""


class IInfeasible(Interface):

    status = Attribute("'infeasible'")
    system = Attribute("The IConstraintSystem.")
    conflict = Attribute("Rows that cannot hold together.")
    minimal = Bool(
        title=_(u"Minimal"),
        description=_(u"False when the node limit stopped the reduction."),
        )

    def getConflictNames():
        """Names of the conflicting rows."""

    def toDict():
        """A JSON-ready description."""


class IUndecided(Interface):

    status = Attribute("'undecided'")
    system = Attribute("The IConstraintSystem.")
    nodes = Int(
        title=_(u"Nodes"),
        )

    def toDict():
        """A JSON-ready description."""


# synthesis

class ISearchConfig(Interface):
    """Settings of a design search."""

    budget = Quantity(
        title=_(u"Budget"),
        description=_(u"Most a design may cost; the scenario budget when "
                      u"unset."),
        required=False,
        default=None,
        )

    max_nodes = Int(
        title=_(u"Maximum nodes"),
        min=1,
        max=8,
        default=6,
        )

    algorithm = Choice(
        title=_(u"Algorithm"),
        values=(u'exhaustive', u'anneal', u'genetic'),
        default=u'exhaustive',
        )

    seed = Int(
        title=_(u"Seed"),
        min=0,
        default=0,
        )

    iterations = Int(
        title=_(u"Iterations"),
        description=_(u"Annealing steps."),
        min=0,
        default=400,
        )

    population = Int(
        title=_(u"Population"),
        min=2,
        default=24,
        )

    generations = Int(
        title=_(u"Generations"),
        min=1,
        default=30,
        )

    temperature = Quantity(
        title=_(u"Initial temperature"),
        default=1.0,
        )

    cooling = Probability(
        title=_(u"Cooling factor"),
        default=0.97,
        )

    mutation_rate = Probability(
        title=_(u"Mutation rate"),
        default=0.2,
        )

    threads = Int(
        title=_(u"Threads"),
        description=_(u"Workers evaluating candidates."),
        min=1,
        default=1,
        )


class IDesignSearch(Interface):
    """A search over fleet designs."""

    config = Attribute("The ISearchConfig.")
    scenario = Attribute("The IScenario.")
    catalog = Attribute("The ICatalog.")

    def evaluate(forest):
        """Score a candidate, caching by its canonical encoding."""

    def run():
        """Search and return a SearchResult."""


# events

class ICandidateEvaluatedEvent(Interface):
    """A search scored a candidate design."""

    design = Attribute("The IFleetDesign.")
    score = Attribute("The IScoreRecord.")
    algorithm = Attribute("Name of the search algorithm.")
    step = Attribute("Iteration or generation the candidate belongs to.")


class IBestDesignChangedEvent(ICandidateEvaluatedEvent):
    """A search found a better design."""


class IIncumbentFoundEvent(Interface):
    """The solver found a better solution."""

    system = Attribute("The IConstraintSystem being solved.")
    objective = Attribute("Objective value of the new incumbent.")
    nodes = Attribute("Nodes explored so far.")


class ILiftTruncatedEvent(Interface):
    """A lift found more finer solutions than its cap allows."""

    coarse = Attribute("The coarse ISolution.")
    level = Attribute("The level lifted to.")
    cap = Attribute("The cap.")


# command line

class IRunReport(Interface):
    """What a command reports on standard output."""

    command = List(
        title=_(u"Command"),
        description=_(u"The arguments the command was run with."),
        value_type=TextLine(),
        )

    inputs = Dict(
        title=_(u"Inputs"),
        description=_(u"SHA-256 digest of every input file, by path."),
        key_type=TextLine(),
        value_type=TextLine(),
        )

    status = TextLine(
        title=_(u"Status"),
        )

    results = Attribute("JSON-serializable payload of the command.")

    def toDict(timing=True):
        """The report as a JSON-serializable dict."""
